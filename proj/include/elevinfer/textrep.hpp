#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

// Text-like representation: discretize the elevation signal, map each
// unique discrete value to a fixed-width word, then build an n-gram
// vocabulary over the encoded corpus.

enum class DiscretizationMode {
    floor_whole,  // floor(e)        -- dense, user-specific style data
    floor_milli,  // floor(e*1e3)/1e3 -- sparse, mined-style data
};

std::string to_string(DiscretizationMode mode);
DiscretizationMode discretization_mode_from_string(const std::string& s);

std::vector<double> discretize(const std::vector<double>& values, DiscretizationMode mode);

// Smallest w >= 1 with l^w >= c (integer-exact; no floating log).
int word_size(std::size_t unique_count, int alphabet_len);

// Bijection between the observed discrete values (sorted ascending) and
// fixed-width strings over the first alphabet_len lowercase letters; the
// i-th value gets the zero-padded base-l rendering of i.
class Codebook {
public:
    Codebook() = default;
    Codebook(std::vector<double> sorted_values, int alphabet_len);

    int alphabet_len() const { return alphabet_len_; }
    int word_width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    // Word of an observed value; throws DataError when the value was never
    // observed.
    std::string word_exact(double value) const;

    // Word of the nearest observed value (ties toward the smaller value).
    // Covers values unseen at fit time, e.g. test folds and perturbed data.
    std::string word_nearest(double value) const;

    // Inverse mapping; throws DataError on an unknown word.
    double value_of(const std::string& word) const;

    std::string to_json() const;
    static Codebook from_json(const std::string& text);

private:
    std::string word_at(std::size_t index) const;

    std::vector<double> values_;
    int alphabet_len_ = 26;
    int width_ = 1;
};

struct Corpus {
    std::vector<std::vector<std::string>> lines;  // one word sequence per sample
    std::vector<std::string> labels;              // aligned to lines
};

struct EncodeResult {
    Corpus corpus;
    Codebook codebook;
};

// One codebook over all samples regardless of label; one corpus line per
// profile. Throws DataError on an empty dataset.
EncodeResult encode(const Dataset& dataset, DiscretizationMode mode, int alphabet_len);

// Encodes a single signal against an existing codebook (nearest-value
// mapping for unseen discrete values).
std::vector<std::string> encode_line(const std::vector<double>& values, DiscretizationMode mode,
                                     const Codebook& codebook);

struct VocabEntry {
    std::string text;        // words joined by single spaces
    int n = 1;               // gram length in words
    std::size_t tf = 0;      // sliding-window occurrences across the corpus
    std::size_t df = 0;      // number of lines containing the entry
};

// Unique n-grams for n in 1..n_max, collected by sliding a word-aligned
// window (stride of one word, partial windows discarded). Entry order is
// deterministic: descending corpus tf, then lexicographic.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<VocabEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const std::vector<VocabEntry>& entries() const { return entries_; }
    int max_n() const;

    // Position of an entry, or npos.
    std::size_t find(const std::string& text) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::string to_json() const;
    static Vocabulary from_json(const std::string& text);

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

Vocabulary build_vocabulary(const Corpus& corpus, int n_max);

// Keeps the target_dim highest-tf entries (ties keep the lexicographically
// smaller); identity when the vocabulary is already small enough.
Vocabulary select_features(const Vocabulary& vocabulary, std::size_t target_dim);

// Greedy left-to-right non-overlapping occurrence counts per entry,
// normalized to sum 1; an all-zero vector stays all-zero.
std::vector<double> vectorize_ngrams(const std::vector<std::string>& line,
                                     const Vocabulary& vocabulary);

// Document-frequency statistics from the training corpus only.
struct TfidfStats {
    Vocabulary vocabulary;
    std::size_t n_docs = 0;
};

TfidfStats fit_tfidf(const Corpus& training_corpus, const Vocabulary& vocabulary);

// tf-idf with natural logs: ln(1+freq) * ln(N/df); freq uses the same
// non-overlapping counting as vectorize_ngrams.
std::vector<double> vectorize_tfidf(const std::vector<std::string>& line, const TfidfStats& stats);

}  // namespace elev
