#include "elevinfer/textrep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "elevinfer/error.hpp"

namespace elev {

using nlohmann::json;

std::string to_string(DiscretizationMode mode) {
    return mode == DiscretizationMode::floor_whole ? "floor_whole" : "floor_milli";
}

DiscretizationMode discretization_mode_from_string(const std::string& s) {
    if (s == "floor_whole") return DiscretizationMode::floor_whole;
    if (s == "floor_milli") return DiscretizationMode::floor_milli;
    throw UsageError("unknown discretization mode '" + s + "'");
}

std::vector<double> discretize(const std::vector<double>& values, DiscretizationMode mode) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("discretize: non-finite elevation value");
        if (mode == DiscretizationMode::floor_whole) {
            out.push_back(std::floor(v));
        } else {
            out.push_back(std::floor(v * 1e3) / 1e3);
        }
    }
    return out;
}

int word_size(std::size_t unique_count, int alphabet_len) {
    if (unique_count < 1) throw UsageError("word_size: unique count must be >= 1");
    if (alphabet_len < 2) throw UsageError("word_size: alphabet length must be >= 2");
    int w = 1;
    std::size_t capacity = static_cast<std::size_t>(alphabet_len);
    while (capacity < unique_count) {
        // l^w >= c is reachable: c fits in size_t and l >= 2
        capacity *= static_cast<std::size_t>(alphabet_len);
        ++w;
    }
    return w;
}

Codebook::Codebook(std::vector<double> sorted_values, int alphabet_len)
    : values_(std::move(sorted_values)), alphabet_len_(alphabet_len) {
    if (values_.empty()) throw DataError("codebook: no discrete values");
    if (alphabet_len_ > 26) {
        throw UsageError("codebook: alphabet too small: only a..z available, got length " +
                         std::to_string(alphabet_len_));
    }
    if (alphabet_len_ < 2) throw UsageError("codebook: alphabet length must be >= 2");
    if (!std::is_sorted(values_.begin(), values_.end())) {
        std::sort(values_.begin(), values_.end());
    }
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    width_ = word_size(values_.size(), alphabet_len_);
}

std::string Codebook::word_at(std::size_t index) const {
    std::string word(static_cast<std::size_t>(width_), 'a');
    std::size_t x = index;
    for (int pos = width_ - 1; pos >= 0; --pos) {
        word[static_cast<std::size_t>(pos)] =
            static_cast<char>('a' + static_cast<int>(x % static_cast<std::size_t>(alphabet_len_)));
        x /= static_cast<std::size_t>(alphabet_len_);
    }
    return word;
}

std::string Codebook::word_exact(double value) const {
    const auto it = std::lower_bound(values_.begin(), values_.end(), value);
    if (it == values_.end() || *it != value) {
        throw DataError("codebook: value not in codebook");
    }
    return word_at(static_cast<std::size_t>(it - values_.begin()));
}

std::string Codebook::word_nearest(double value) const {
    const auto it = std::lower_bound(values_.begin(), values_.end(), value);
    std::size_t idx;
    if (it == values_.begin()) {
        idx = 0;
    } else if (it == values_.end()) {
        idx = values_.size() - 1;
    } else {
        const auto hi = static_cast<std::size_t>(it - values_.begin());
        const auto lo = hi - 1;
        // ties toward the smaller value
        idx = (value - values_[lo] <= values_[hi] - value) ? lo : hi;
    }
    return word_at(idx);
}

double Codebook::value_of(const std::string& word) const {
    if (word.size() != static_cast<std::size_t>(width_)) {
        throw DataError("codebook: word '" + word + "' has wrong width");
    }
    std::size_t index = 0;
    for (char ch : word) {
        const int digit = ch - 'a';
        if (digit < 0 || digit >= alphabet_len_) throw DataError("codebook: bad character in word");
        index = index * static_cast<std::size_t>(alphabet_len_) + static_cast<std::size_t>(digit);
    }
    if (index >= values_.size()) throw DataError("codebook: word '" + word + "' out of range");
    return values_[index];
}

std::string Codebook::to_json() const {
    json doc;
    doc["alphabet_len"] = alphabet_len_;
    doc["word_width"] = width_;
    doc["values"] = values_;
    return doc.dump();
}

Codebook Codebook::from_json(const std::string& text) {
    json doc = json::parse(text);
    Codebook cb(doc.at("values").get<std::vector<double>>(), doc.at("alphabet_len").get<int>());
    return cb;
}

EncodeResult encode(const Dataset& dataset, DiscretizationMode mode, int alphabet_len) {
    if (dataset.samples.empty()) throw DataError("encode: empty dataset");

    std::vector<std::vector<double>> discrete;
    discrete.reserve(dataset.samples.size());
    std::set<double> unique_values;
    for (const auto& sample : dataset.samples) {
        discrete.push_back(discretize(sample.values, mode));
        unique_values.insert(discrete.back().begin(), discrete.back().end());
    }

    EncodeResult result;
    result.codebook = Codebook({unique_values.begin(), unique_values.end()}, alphabet_len);
    for (std::size_t i = 0; i < discrete.size(); ++i) {
        std::vector<std::string> line;
        line.reserve(discrete[i].size());
        for (double v : discrete[i]) line.push_back(result.codebook.word_exact(v));
        result.corpus.lines.push_back(std::move(line));
        result.corpus.labels.push_back(dataset.samples[i].label.value_or(""));
    }
    return result;
}

std::vector<std::string> encode_line(const std::vector<double>& values, DiscretizationMode mode,
                                     const Codebook& codebook) {
    std::vector<std::string> line;
    line.reserve(values.size());
    for (double v : discretize(values, mode)) line.push_back(codebook.word_nearest(v));
    return line;
}

Vocabulary::Vocabulary(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const VocabEntry& a, const VocabEntry& b) {
        if (a.tf != b.tf) return a.tf > b.tf;
        return a.text < b.text;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].text] = i;
}

int Vocabulary::max_n() const {
    int m = 0;
    for (const auto& e : entries_) m = std::max(m, e.n);
    return m;
}

std::size_t Vocabulary::find(const std::string& text) const {
    const auto it = index_.find(text);
    return it == index_.end() ? npos : it->second;
}

std::string Vocabulary::to_json() const {
    json arr = json::array();
    for (const auto& e : entries_) {
        arr.push_back({{"text", e.text}, {"n", e.n}, {"tf", e.tf}, {"df", e.df}});
    }
    return arr.dump();
}

Vocabulary Vocabulary::from_json(const std::string& text) {
    std::vector<VocabEntry> entries;
    for (const auto& item : json::parse(text)) {
        entries.push_back({item.at("text").get<std::string>(), item.at("n").get<int>(),
                           item.at("tf").get<std::size_t>(), item.at("df").get<std::size_t>()});
    }
    return Vocabulary(std::move(entries));
}

namespace {

std::string join_words(const std::vector<std::string>& words, std::size_t start, int n) {
    std::string out = words[start];
    for (int k = 1; k < n; ++k) {
        out += ' ';
        out += words[start + static_cast<std::size_t>(k)];
    }
    return out;
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, int n_max) {
    if (n_max < 1) throw UsageError("build_vocabulary: n_max must be >= 1");

    struct Tally {
        int n = 0;
        std::size_t tf = 0;
        std::size_t df = 0;
        std::size_t last_line = static_cast<std::size_t>(-1);
    };
    std::unordered_map<std::string, Tally> tallies;

    for (std::size_t li = 0; li < corpus.lines.size(); ++li) {
        const auto& words = corpus.lines[li];
        for (int n = 1; n <= n_max; ++n) {
            if (words.size() < static_cast<std::size_t>(n)) break;  // partial windows discarded
            for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= words.size(); ++start) {
                auto& tally = tallies[join_words(words, start, n)];
                tally.n = n;
                tally.tf += 1;
                if (tally.last_line != li) {
                    tally.df += 1;
                    tally.last_line = li;
                }
            }
        }
    }

    std::vector<VocabEntry> entries;
    entries.reserve(tallies.size());
    for (auto& [text, tally] : tallies) {
        entries.push_back({text, tally.n, tally.tf, tally.df});
    }
    return Vocabulary(std::move(entries));
}

Vocabulary select_features(const Vocabulary& vocabulary, std::size_t target_dim) {
    if (target_dim < 1) throw UsageError("select_features: target_dim must be >= 1");
    if (vocabulary.size() <= target_dim) return vocabulary;
    // entries are already ordered by descending tf then lexicographic
    std::vector<VocabEntry> kept(vocabulary.entries().begin(),
                                 vocabulary.entries().begin() + static_cast<long>(target_dim));
    return Vocabulary(std::move(kept));
}

namespace {

// Greedy left-to-right non-overlapping occurrence count for every
// vocabulary entry present in the line.
std::vector<std::size_t> count_nonoverlapping(const std::vector<std::string>& line,
                                              const Vocabulary& vocabulary) {
    std::vector<std::size_t> counts(vocabulary.size(), 0);
    if (line.empty() || vocabulary.size() == 0) return counts;

    const int n_max = vocabulary.max_n();
    std::unordered_map<std::size_t, std::vector<std::size_t>> positions;  // entry -> starts
    for (int n = 1; n <= n_max; ++n) {
        if (line.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= line.size(); ++start) {
            const auto idx = vocabulary.find(join_words(line, start, n));
            if (idx != Vocabulary::npos && vocabulary.entries()[idx].n == n) {
                positions[idx].push_back(start);
            }
        }
    }
    for (const auto& [idx, starts] : positions) {
        const auto n = static_cast<std::size_t>(vocabulary.entries()[idx].n);
        std::size_t next_free = 0;
        std::size_t cnt = 0;
        for (std::size_t s : starts) {  // starts are ascending by construction
            if (s >= next_free) {
                ++cnt;
                next_free = s + n;
            }
        }
        counts[idx] = cnt;
    }
    return counts;
}

}  // namespace

std::vector<double> vectorize_ngrams(const std::vector<std::string>& line,
                                     const Vocabulary& vocabulary) {
    const auto counts = count_nonoverlapping(line, vocabulary);
    std::vector<double> vec(counts.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        vec[i] = static_cast<double>(counts[i]);
        total += vec[i];
    }
    if (total > 0.0) {
        for (auto& v : vec) v /= total;
    }
    return vec;
}

TfidfStats fit_tfidf(const Corpus& training_corpus, const Vocabulary& vocabulary) {
    if (training_corpus.lines.empty()) throw DataError("fit_tfidf: empty training corpus");
    // Recount df against the given (possibly feature-selected) vocabulary
    // on the training corpus only.
    std::vector<VocabEntry> entries = vocabulary.entries();
    for (auto& e : entries) e.df = 0;

    for (const auto& line : training_corpus.lines) {
        const auto counts = count_nonoverlapping(line, vocabulary);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0) entries[i].df += 1;
        }
    }
    TfidfStats stats;
    stats.vocabulary = Vocabulary(std::move(entries));
    stats.n_docs = training_corpus.lines.size();
    return stats;
}

std::vector<double> vectorize_tfidf(const std::vector<std::string>& line, const TfidfStats& stats) {
    const auto counts = count_nonoverlapping(line, stats.vocabulary);
    std::vector<double> vec(counts.size(), 0.0);
    const double n_docs = static_cast<double>(stats.n_docs);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto df = stats.vocabulary.entries()[i].df;
        if (counts[i] == 0 || df == 0) continue;
        const double tf = std::log(1.0 + static_cast<double>(counts[i]));
        const double idf = std::log(n_docs / static_cast<double>(df));
        vec[i] = tf * idf;
    }
    return vec;
}

}  // namespace elev
