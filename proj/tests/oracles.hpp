#pragma once

// Brute-force reference implementations, independent of the library code
// paths they check. Everything here favors obviousness over speed.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Line = std::vector<std::string>;

inline std::string join(const Line& words, std::size_t start, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += words[start + i];
    }
    return out;
}

struct NaiveVocab {
    // gram -> (n, corpus tf, df)
    struct Info {
        std::size_t n = 0;
        std::size_t tf = 0;
        std::size_t df = 0;
    };
    std::map<std::string, Info> grams;
};

inline NaiveVocab naive_vocabulary(const std::vector<Line>& lines, std::size_t n_max) {
    NaiveVocab vocab;
    for (const auto& line : lines) {
        std::set<std::string> seen_in_line;
        for (std::size_t n = 1; n <= n_max; ++n) {
            if (line.size() < n) continue;
            for (std::size_t start = 0; start + n <= line.size(); ++start) {
                const auto g = join(line, start, n);
                auto& info = vocab.grams[g];
                info.n = n;
                info.tf += 1;
                seen_in_line.insert(g);
            }
        }
        for (const auto& g : seen_in_line) vocab.grams[g].df += 1;
    }
    return vocab;
}

// greedy left-to-right non-overlapping occurrences of gram in line
inline std::size_t naive_count(const Line& line, const Line& gram) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i + gram.size() <= line.size()) {
        bool match = true;
        for (std::size_t k = 0; k < gram.size(); ++k) {
            if (line[i + k] != gram[k]) {
                match = false;
                break;
            }
        }
        if (match) {
            ++count;
            i += gram.size();
        } else {
            ++i;
        }
    }
    return count;
}

inline Line split(const std::string& text) {
    Line out;
    std::string word;
    for (char c : text) {
        if (c == ' ') {
            if (!word.empty()) out.push_back(word);
            word.clear();
        } else {
            word += c;
        }
    }
    if (!word.empty()) out.push_back(word);
    return out;
}

inline std::vector<double> naive_ngram_vector(const Line& line,
                                              const std::vector<std::string>& entries) {
    std::vector<double> vec(entries.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        vec[i] = static_cast<double>(naive_count(line, split(entries[i])));
        total += vec[i];
    }
    if (total > 0.0) {
        for (auto& v : vec) v /= total;
    }
    return vec;
}

inline std::vector<double> naive_tfidf_vector(const Line& line,
                                              const std::vector<std::string>& entries,
                                              const std::vector<Line>& training_lines) {
    std::vector<double> vec(entries.size(), 0.0);
    const double n_docs = static_cast<double>(training_lines.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto gram = split(entries[i]);
        const auto freq = naive_count(line, gram);
        std::size_t df = 0;
        for (const auto& doc : training_lines) {
            if (naive_count(doc, gram) > 0) ++df;
        }
        if (freq == 0 || df == 0) continue;
        vec[i] = std::log(1.0 + static_cast<double>(freq)) *
                 std::log(n_docs / static_cast<double>(df));
    }
    return vec;
}

// argmax of elementwise sums, ties to the lowest index
inline std::size_t naive_soft_vote(const std::vector<std::vector<double>>& dists) {
    std::vector<double> sums(dists[0].size(), 0.0);
    for (const auto& d : dists) {
        for (std::size_t i = 0; i < d.size(); ++i) sums[i] += d[i];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < sums.size(); ++i) {
        if (sums[i] > sums[best]) best = i;
    }
    return best;
}

}  // namespace oracle
