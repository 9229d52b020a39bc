#include "sentdist/synthetic.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "sentdist/rng.hpp"

namespace sentdist {

namespace {

const std::array<const char*, 45> kPositive = {
    "love",     "great",    "awesome",  "fantastic", "wonderful", "amazing",  "happy",
    "excited",  "brilliant", "perfect", "beautiful", "enjoyed",   "fun",      "best",
    "glad",     "sweet",    "nice",     "cool",      "win",       "winning",  "smile",
    "laughing", "delight",  "thrilled", "superb",    "lovely",    "yay",      "good",
    "excellent", "adore",   "favorite", "blessed",   "cheerful",  "grateful", "joy",
    "pleased",  "proud",    "relaxed",  "satisfied", "shine",     "splendid", "sunny",
    "terrific", "upbeat",   "victory"};

const std::array<const char*, 45> kNegative = {
    "hate",     "awful",    "terrible", "horrible", "sad",       "angry",    "worst",
    "bad",      "annoyed",  "broken",   "cry",      "crying",    "depressed", "disappointed",
    "disaster", "dreadful", "fail",     "failing",  "fear",      "gloomy",   "gross",
    "hurt",     "lonely",   "lost",     "mad",      "miserable", "pain",     "pathetic",
    "poor",     "rage",     "regret",   "rotten",   "ruined",    "scared",   "sick",
    "sorrow",   "stressed", "stuck",    "suffering", "tired",    "ugly",     "unhappy",
    "upset",    "whine",    "worse"};

const std::array<const char*, 60> kFiller = {
    "the",   "a",      "to",     "and",   "of",     "in",     "on",     "for",  "with",
    "at",    "by",     "from",   "today", "tomorrow", "yesterday", "morning", "night", "week",
    "home",  "work",   "school", "coffee", "lunch",  "dinner", "movie",  "song", "music",
    "game",  "phone",  "car",    "bus",   "train",  "rain",   "sun",    "weather", "friend",
    "people", "family", "dog",   "cat",   "book",   "show",   "episode", "team", "class",
    "street", "city",  "park",   "store", "weekend", "monday", "april",  "time", "day",
    "hour",  "minute", "thing",  "stuff", "place",  "way"};

// Clamped Gaussian sample via Box-Muller on the deterministic generator.
double gaussian(SplitMix64& g, double mean, double stddev) {
    double u1 = g.next_double();
    double u2 = g.next_double();
    if (u1 < 1e-12) u1 = 1e-12;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mean + stddev * z;
}

std::size_t clamped_count(SplitMix64& g, double mean, double stddev, std::size_t lo,
                          std::size_t hi) {
    double v = std::round(gaussian(g, mean, stddev));
    if (v < static_cast<double>(lo)) v = static_cast<double>(lo);
    if (v > static_cast<double>(hi)) v = static_cast<double>(hi);
    return static_cast<std::size_t>(v);
}

template <std::size_t N>
const char* pick(SplitMix64& g, const std::array<const char*, N>& words) {
    return words[static_cast<std::size_t>(g.next_below(N))];
}

// Tweet-like surface clutter around the token stream. Preprocessing strips
// all of it; the CSV reader has to cope with commas and quotes.
std::string render_text(SplitMix64& g, const std::vector<std::string>& tokens) {
    std::string text;
    if (g.next_double() < 0.15) {
        text += "@u";
        text += std::to_string(g.next_below(100000));
        text += ' ';
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string word = tokens[i];
        double roll = g.next_double();
        if (roll < 0.10) {
            for (char& c : word) c = static_cast<char>(c - 'a' + 'A');
        } else if (roll < 0.18) {
            word[0] = static_cast<char>(word[0] - 'a' + 'A');
        }
        if (g.next_double() < 0.06) text += '#';
        text += word;
        if (i + 1 < tokens.size()) text += ' ';
    }
    double tail = g.next_double();
    if (tail < 0.08) text += ", right?";
    else if (tail < 0.16) text += "!!!";
    else if (tail < 0.24) text += " :)";
    else if (tail < 0.30) text += " :(";
    else if (tail < 0.36) text += "...";
    else if (tail < 0.40) text += " \"so true\"";
    else if (tail < 0.46) text += ".";
    return text;
}

std::vector<std::string> make_tokens(SplitMix64& g, Sentiment label) {
    std::size_t length = clamped_count(g, 10.0, 2.8, 6, 18);
    std::size_t own = clamped_count(g, 7.5, 1.2, 6, 10);
    if (own > length) own = length;

    const auto& own_words = label == Sentiment::Positive ? kPositive : kNegative;
    const auto& other_words = label == Sentiment::Positive ? kNegative : kPositive;

    std::vector<std::string> tokens;
    tokens.reserve(length);
    for (std::size_t i = 0; i < own; ++i) tokens.emplace_back(pick(g, own_words));
    for (std::size_t i = own; i < length; ++i) {
        if (g.next_double() < 0.01) {
            tokens.emplace_back(pick(g, other_words));
        } else {
            tokens.emplace_back(pick(g, kFiller));
        }
    }
    deterministic_shuffle(tokens, g);
    return tokens;
}

std::string make_neutral_text(SplitMix64& g) {
    std::size_t length = clamped_count(g, 10.0, 3.0, 3, 18);
    std::vector<std::string> tokens;
    tokens.reserve(length);
    for (std::size_t i = 0; i < length; ++i) tokens.emplace_back(pick(g, kFiller));
    return render_text(g, tokens);
}

std::string csv_quote(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ofstream& out, const std::string& label, std::uint64_t row_id,
               const std::string& user, const std::string& text) {
    out << csv_quote(label) << ',' << csv_quote(std::to_string(1467810000 + row_id)) << ','
        << csv_quote("Mon Apr 06 22:19:45 PDT 2009") << ',' << csv_quote("NO_QUERY") << ','
        << csv_quote(user) << ',' << csv_quote(text) << '\n';
}

}  // namespace

std::vector<Document> make_synthetic_documents(const SyntheticSpec& spec) {
    require(spec.count >= 2, "synthetic corpus needs at least 2 documents");
    SplitMix64 g(spec.seed);
    std::vector<Document> docs;
    docs.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Document doc;
        doc.id = i;
        // Alternating labels keep the class balance exact.
        doc.label = (i % 2 == 0) ? Sentiment::Positive : Sentiment::Negative;
        doc.raw_text = render_text(g, make_tokens(g, doc.label));
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_synthetic_csv(const std::filesystem::path& path, const SyntheticSpec& spec) {
    std::vector<Document> docs = make_synthetic_documents(spec);
    // Separate stream so neutral text does not disturb the polar documents.
    SplitMix64 g(spec.seed ^ 0x6e65757472616cULL);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path.string());

    std::size_t neutral_every =
        spec.neutral_count > 0 ? std::max<std::size_t>(1, docs.size() / spec.neutral_count) : 0;
    std::size_t neutral_written = 0;
    std::uint64_t row_id = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const Document& doc = docs[i];
        std::string label = doc.label == Sentiment::Positive ? "4" : "0";
        write_row(out, label, row_id++, "synth_user_" + std::to_string(doc.id % 4096),
                  doc.raw_text);
        if (neutral_every > 0 && (i + 1) % neutral_every == 0 &&
            neutral_written < spec.neutral_count) {
            write_row(out, "2", row_id++, "synth_user_neutral", make_neutral_text(g));
            ++neutral_written;
        }
    }
    while (neutral_written < spec.neutral_count) {
        write_row(out, "2", row_id++, "synth_user_neutral", make_neutral_text(g));
        ++neutral_written;
    }
    if (!out.flush()) throw IoError("failed writing output file: " + path.string());
}

}  // namespace sentdist
