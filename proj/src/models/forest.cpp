#include "elevinfer/forest.hpp"

#include <algorithm>
#include <cmath>

#include "elevinfer/error.hpp"
#include "elevinfer/rng.hpp"
#include "model_internal.hpp"

namespace elev {

using nlohmann::json;

namespace {

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    std::vector<double> dist;  // leaf class distribution
};

struct Tree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& predict(const double* row) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const auto& node = nodes[static_cast<std::size_t>(at)];
            at = row[node.feature] <= node.threshold ? node.left : node.right;
        }
        return nodes[static_cast<std::size_t>(at)].dist;
    }
};

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    double g = 1.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, const std::vector<std::size_t>& y, std::size_t n_classes,
                const ForestConfig& config, Rng& rng)
        : X_(X), y_(y), n_classes_(n_classes), config_(config), rng_(rng) {
        const auto d = static_cast<double>(X.cols);
        std::size_t m;
        if (config.features_fraction > 0.0) {
            m = static_cast<std::size_t>(std::lround(config.features_fraction * d));
        } else {
            m = static_cast<std::size_t>(std::lround(std::sqrt(d)));
        }
        features_per_split_ = std::clamp<std::size_t>(m, 1, X.cols);
    }

    Tree build(std::vector<std::size_t> indices) {
        tree_.nodes.clear();
        grow(std::move(indices), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> indices, int depth) {
        std::vector<std::size_t> counts(n_classes_, 0);
        for (auto i : indices) ++counts[y_[i]];

        const auto node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const bool pure = *std::max_element(counts.begin(), counts.end()) == indices.size();
        const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
        if (pure || indices.size() < 2 || depth_capped) {
            make_leaf(node_id, counts, indices.size());
            return node_id;
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = gini(counts, indices.size());

        // candidate features in ascending index order so the search is
        // order-insensitive for a fixed sample multiset
        auto candidates = rng_.sample_without_replacement(X_.cols, features_per_split_);
        std::sort(candidates.begin(), candidates.end());

        std::vector<std::pair<double, std::size_t>> sorted(indices.size());
        std::vector<std::size_t> left_counts(n_classes_);
        for (auto f : candidates) {
            for (std::size_t i = 0; i < indices.size(); ++i) {
                sorted[i] = {X_.at(indices[i], f), y_[indices[i]]};
            }
            std::sort(sorted.begin(), sorted.end());

            std::fill(left_counts.begin(), left_counts.end(), 0);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                ++left_counts[sorted[i].second];
                if (sorted[i].first == sorted[i + 1].first) continue;

                const auto n_left = i + 1;
                const auto n_right = sorted.size() - n_left;
                double g_left = 1.0, g_right = 1.0;
                for (std::size_t cls = 0; cls < n_classes_; ++cls) {
                    const double pl = static_cast<double>(left_counts[cls]) /
                                      static_cast<double>(n_left);
                    const double pr =
                        static_cast<double>(counts[cls] - left_counts[cls]) /
                        static_cast<double>(n_right);
                    g_left -= pl * pl;
                    g_right -= pr * pr;
                }
                const double weighted =
                    (static_cast<double>(n_left) * g_left + static_cast<double>(n_right) * g_right) /
                    static_cast<double>(sorted.size());
                if (weighted < best_impurity - 1e-12) {
                    best_impurity = weighted;
                    best_feature = static_cast<int>(f);
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                }
            }
        }

        if (best_feature < 0) {
            make_leaf(node_id, counts, indices.size());
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (auto i : indices) {
            (X_.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
                .push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        const int left_id = grow(std::move(left), depth + 1);
        const int right_id = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(node_id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }

    void make_leaf(int node_id, const std::vector<std::size_t>& counts, std::size_t total) {
        auto& node = tree_.nodes[static_cast<std::size_t>(node_id)];
        node.dist.resize(n_classes_);
        for (std::size_t cls = 0; cls < n_classes_; ++cls) {
            node.dist[cls] = static_cast<double>(counts[cls]) / static_cast<double>(total);
        }
    }

    const Matrix& X_;
    const std::vector<std::size_t>& y_;
    std::size_t n_classes_;
    const ForestConfig& config_;
    Rng& rng_;
    std::size_t features_per_split_ = 1;
    Tree tree_;
};

class ForestModel final : public TrainedModel {
public:
    ForestModel(std::vector<std::string> labels, std::size_t input_dim, std::vector<Tree> trees,
                ForestConfig config)
        : TrainedModel(Kind::forest, std::move(labels), input_dim),
          trees_(std::move(trees)),
          config_(config) {}

    Matrix predict_proba_impl(const Matrix& X) const override {
        Matrix probs(X.rows, labels_.size());
        for (std::size_t i = 0; i < X.rows; ++i) {
            for (const auto& tree : trees_) {
                const auto& dist = tree.predict(X.row(i));
                for (std::size_t cls = 0; cls < dist.size(); ++cls) {
                    probs.at(i, cls) += dist[cls];
                }
            }
            for (std::size_t cls = 0; cls < labels_.size(); ++cls) {
                probs.at(i, cls) /= static_cast<double>(trees_.size());
            }
        }
        return probs;
    }

    std::string to_json() const override {
        json doc;
        doc["version"] = 1;
        doc["kind"] = "forest";
        doc["labels"] = labels_;
        doc["input_dim"] = input_dim_;
        doc["preprocessing_fingerprint"] = preprocessing_fingerprint_;
        doc["config"] = {{"n_trees", config_.n_trees},
                         {"max_depth", config_.max_depth},
                         {"features_fraction", config_.features_fraction},
                         {"bootstrap", config_.bootstrap},
                         {"seed", config_.seed}};
        json trees = json::array();
        for (const auto& tree : trees_) {
            json nodes = json::array();
            for (const auto& n : tree.nodes) {
                nodes.push_back({{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right},
                                 {"dist", n.dist}});
            }
            trees.push_back(std::move(nodes));
        }
        doc["params"]["trees"] = std::move(trees);
        return doc.dump();
    }

    const std::vector<Tree>& trees() const { return trees_; }

private:
    std::vector<Tree> trees_;
    ForestConfig config_;
};

}  // namespace

std::unique_ptr<TrainedModel> train_forest(const Matrix& X, const std::vector<std::size_t>& y,
                                           const std::vector<std::string>& label_order,
                                           const ForestConfig& config) {
    if (X.rows != y.size()) throw UsageError("forest: X rows != y length");
    if (X.rows == 0) throw DataError("forest: empty training set");
    const std::size_t k = label_order.size();
    if (k < 2) throw DataError("forest: degenerate labels: need at least 2 classes");
    std::vector<std::size_t> counts(k, 0);
    for (auto cls : y) {
        if (cls >= k) throw DataError("forest: label index out of range");
        ++counts[cls];
    }
    for (std::size_t cls = 0; cls < k; ++cls) {
        if (counts[cls] < 2) {
            throw DataError("forest: degenerate labels: class " + std::to_string(cls) +
                            " has fewer than 2 samples");
        }
    }
    if (config.n_trees < 1) throw UsageError("forest: n_trees must be >= 1");

    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(config.n_trees));
    for (int t = 0; t < config.n_trees; ++t) {
        Rng rng(derive_seed(config.seed, "tree", static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> indices;
        indices.reserve(X.rows);
        if (config.bootstrap) {
            for (std::size_t i = 0; i < X.rows; ++i) indices.push_back(rng.next_below(X.rows));
        } else {
            for (std::size_t i = 0; i < X.rows; ++i) indices.push_back(i);
        }
        TreeBuilder builder(X, y, k, config, rng);
        trees.push_back(builder.build(std::move(indices)));
    }
    return std::make_unique<ForestModel>(label_order, X.cols, std::move(trees), config);
}

namespace detail {

std::unique_ptr<TrainedModel> forest_from_json(const json& doc) {
    ForestConfig config;
    const auto& c = doc.at("config");
    config.n_trees = c.at("n_trees").get<int>();
    config.max_depth = c.at("max_depth").get<int>();
    config.features_fraction = c.at("features_fraction").get<double>();
    config.bootstrap = c.at("bootstrap").get<bool>();
    config.seed = c.at("seed").get<std::uint64_t>();

    std::vector<Tree> trees;
    for (const auto& tj : doc.at("params").at("trees")) {
        Tree tree;
        for (const auto& nj : tj) {
            TreeNode n;
            n.feature = nj.at("feature").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
            n.dist = nj.at("dist").get<std::vector<double>>();
            tree.nodes.push_back(std::move(n));
        }
        trees.push_back(std::move(tree));
    }
    auto model = std::make_unique<ForestModel>(doc.at("labels").get<std::vector<std::string>>(),
                                               doc.at("input_dim").get<std::size_t>(),
                                               std::move(trees), config);
    model->set_preprocessing_fingerprint(doc.at("preprocessing_fingerprint").get<std::string>());
    return model;
}

}  // namespace detail

// test hook: per-tree distributions for the compositional check
std::vector<std::vector<double>> forest_tree_votes(const TrainedModel& model, const double* row) {
    const auto* forest = dynamic_cast<const ForestModel*>(&model);
    if (!forest) throw UsageError("forest_tree_votes: not a forest model");
    std::vector<std::vector<double>> votes;
    for (const auto& tree : forest->trees()) votes.push_back(tree.predict(row));
    return votes;
}

}  // namespace elev
