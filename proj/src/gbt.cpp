#include "causim/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "causim/error.hpp"
#include "causim/rng.hpp"
#include "causim/stats.hpp"
#include "features.hpp"

namespace causim {

namespace {

constexpr std::uint64_t kSubsampleStream = 0x474254;
constexpr std::size_t kMaxBinsLimit = 256;
constexpr int kMaxHalvings = 60;

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Thresholds for one feature: midpoints between adjacent distinct values,
// all of them when there are few distinct values, otherwise at quantiles.
std::vector<double> cut_points(std::span<const double> column, std::size_t max_bins) {
    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> cuts;
    if (distinct.size() <= max_bins) {
        for (std::size_t k = 0; k + 1 < distinct.size(); ++k) cuts.push_back(0.5 * (distinct[k] + distinct[k + 1]));
        return cuts;
    }
    const std::size_t n = sorted.size();
    for (std::size_t b = 1; b < max_bins; ++b) {
        const std::size_t idx = (b * n + max_bins - 1) / max_bins - 1;  // ceil(b n / B) - 1
        const double v = sorted[idx];
        const auto next = std::upper_bound(distinct.begin(), distinct.end(), v);
        if (next == distinct.end()) continue;
        const double t = 0.5 * (v + *next);
        if (cuts.empty() || t > cuts.back()) cuts.push_back(t);
    }
    return cuts;
}

struct Split {
    bool found = false;
    std::size_t feature = 0;
    std::size_t bin = 0;  // rows with code <= bin go left
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const GbtConfig& config, const std::vector<std::vector<double>>& cuts,
                const std::vector<std::vector<std::uint8_t>>& codes, const std::vector<double>& residual,
                const std::vector<double>& hessian, const std::vector<double>& margin, std::span<const double> y)
        : config_(config), cuts_(cuts), codes_(codes), r_(residual), h_(hessian), f_(margin), y_(y) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        tree_ = {};
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const Split s = (depth < config_.max_depth && rows.size() >= 2 * config_.min_leaf) ? best_split(rows) : Split{};
        if (!s.found) {
            tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value(rows);
            return id;
        }
        std::vector<std::size_t> left, right;
        for (auto i : rows) (codes_[s.feature][i] <= s.bin ? left : right).push_back(i);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(s.feature);
        node.threshold = cuts_[s.feature][s.bin];
        node.left = l;
        node.right = r;
        return id;
    }

    Split best_split(const std::vector<std::size_t>& rows) const {
        double total = 0.0, total_sq = 0.0;
        for (auto i : rows) {
            total += r_[i];
            total_sq += r_[i] * r_[i];
        }
        const double n = static_cast<double>(rows.size());
        const double parent = total * total / n;
        const double min_gain = 1e-12 * total_sq;

        Split best;
        std::vector<double> sum;
        std::vector<std::size_t> count;
        for (std::size_t f = 0; f < cuts_.size(); ++f) {
            const std::size_t bins = cuts_[f].size() + 1;
            if (bins < 2) continue;
            sum.assign(bins, 0.0);
            count.assign(bins, 0);
            const auto& code = codes_[f];
            for (auto i : rows) {
                sum[code[i]] += r_[i];
                ++count[code[i]];
            }
            double sl = 0.0;
            std::size_t nl = 0;
            for (std::size_t b = 0; b + 1 < bins; ++b) {
                sl += sum[b];
                nl += count[b];
                const std::size_t nr = rows.size() - nl;
                if (nl < config_.min_leaf) continue;
                if (nr < config_.min_leaf) break;
                const double sr = total - sl;
                const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) - parent;
                if (gain > min_gain && (!best.found || gain > best.gain)) best = {true, f, b, gain};
            }
        }
        return best;
    }

    double leaf_value(const std::vector<std::size_t>& rows) const {
        if (rows.empty()) return 0.0;
        double g = 0.0, h = 0.0;
        for (auto i : rows) {
            g += r_[i];
            h += h_[i];
        }
        if (config_.loss == GbtLoss::squared) return config_.learning_rate * g / static_cast<double>(rows.size());
        if (!(h > 0.0)) return 0.0;
        double delta = config_.learning_rate * g / h;
        const double before = leaf_loss(rows, 0.0);
        for (int k = 0; k < kMaxHalvings; ++k) {
            if (leaf_loss(rows, delta) <= before) return delta;
            delta *= 0.5;
        }
        return 0.0;
    }

    double leaf_loss(const std::vector<std::size_t>& rows, double delta) const {
        double s = 0.0;
        for (auto i : rows) {
            const double z = f_[i] + delta;
            s += softplus(z) - y_[i] * z;
        }
        return s;
    }

    const GbtConfig& config_;
    const std::vector<std::vector<double>>& cuts_;
    const std::vector<std::vector<std::uint8_t>>& codes_;
    const std::vector<double>& r_;
    const std::vector<double>& h_;
    const std::vector<double>& f_;
    std::span<const double> y_;
    RegressionTree tree_;
};

double training_loss(GbtLoss loss, std::span<const double> y, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += loss == GbtLoss::squared ? (y[i] - f[i]) * (y[i] - f[i]) : softplus(f[i]) - y[i] * f[i];
    }
    return s / static_cast<double>(y.size());
}

}  // namespace

std::string to_string(GbtLoss loss) { return loss == GbtLoss::squared ? "squared" : "logistic"; }

GbtLoss parse_gbt_loss(std::string_view s) {
    if (s == "squared") return GbtLoss::squared;
    if (s == "logistic") return GbtLoss::logistic;
    throw InvalidConfigError("unknown boosting loss '" + std::string(s) + "'");
}

void GbtConfig::validate() const {
    if (max_depth < 1) throw InvalidConfigError("tree depth must be at least 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw InvalidConfigError("learning rate must lie in (0, 1]");
    if (min_leaf < 1) throw InvalidConfigError("min_leaf must be at least 1");
    if (max_bins < 2 || max_bins > kMaxBinsLimit) throw InvalidConfigError("max_bins must lie in [2, 256]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidConfigError("subsample must lie in (0, 1]");
}

double RegressionTree::evaluate(std::span<const double> x) const {
    std::size_t k = 0;
    while (!nodes[k].is_leaf()) {
        const auto& n = nodes[k];
        k = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[k].value;
}

std::size_t RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        const auto [k, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[k].is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(nodes[k].left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes[k].right), d + 1);
        }
    }
    return deepest;
}

std::vector<std::size_t> RegressionTree::used_features() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
        if (!n.is_leaf()) out.push_back(static_cast<std::size_t>(n.feature));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void GbtModel::validate() const {
    if (features.empty()) throw InvalidModelError("ensemble needs at least one feature");
    if (!std::isfinite(base_score)) throw InvalidModelError("base score must be finite");
    for (std::size_t t = 0; t < trees.size(); ++t) {
        const auto& nodes = trees[t].nodes;
        if (nodes.empty()) throw InvalidModelError("tree " + std::to_string(t) + " is empty");
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto& n = nodes[k];
            if (n.is_leaf()) {
                if (!std::isfinite(n.value)) throw InvalidModelError("non-finite leaf value");
                continue;
            }
            if (static_cast<std::size_t>(n.feature) >= features.size()) {
                throw InvalidModelError("tree " + std::to_string(t) + " references feature index " +
                                        std::to_string(n.feature));
            }
            // Children must come later so that traversal terminates.
            const auto ok = [&](int c) { return c > static_cast<int>(k) && static_cast<std::size_t>(c) < nodes.size(); };
            if (!ok(n.left) || !ok(n.right) || !std::isfinite(n.threshold)) {
                throw InvalidModelError("tree " + std::to_string(t) + " has a malformed node");
            }
        }
    }
}

double GbtModel::margin_row(std::span<const double> x) const {
    if (x.size() != features.size()) throw InvalidArgumentError("row width differs from feature count");
    double f = base_score;
    for (const auto& t : trees) f += t.evaluate(x);
    return f;
}

double GbtModel::predict_row(std::span<const double> x) const {
    const double f = margin_row(x);
    return loss == GbtLoss::logistic ? stats::sigmoid(f) : f;
}

std::vector<double> GbtModel::predict_margin(const Dataset& data) const {
    const auto cols = detail::feature_columns(data, features);
    std::vector<double> out(data.n_rows());
    std::vector<double> x(features.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) x[j] = cols[j][i];
        out[i] = margin_row(x);
    }
    return out;
}

std::vector<double> GbtModel::predict(const Dataset& data) const {
    auto out = predict_margin(data);
    if (loss == GbtLoss::logistic) {
        for (auto& v : out) v = stats::sigmoid(v);
    }
    return out;
}

GbtModel gbt_train(const Dataset& train, std::string_view target, const std::vector<std::string>& features,
                   const GbtConfig& config) {
    config.validate();
    if (features.empty()) throw InvalidConfigError("ensemble needs at least one feature");
    const auto cols = detail::feature_columns(train, features);
    const auto y = train.column(target);
    const std::size_t n = train.n_rows();
    for (double v : y) {
        if (!std::isfinite(v)) throw InvalidArgumentError("boosting target must be finite");
        if (config.loss == GbtLoss::logistic && v != 0.0 && v != 1.0) {
            throw NonBinaryTargetError("logistic boosting needs a 0/1 target");
        }
    }
    for (const auto& c : cols) {
        for (double v : c) {
            if (!std::isfinite(v)) throw InvalidArgumentError("boosting inputs must be finite");
        }
    }
    const double ybar = stats::mean(y);
    const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (constant) throw DegenerateTargetError("target column '" + std::string(target) + "' is constant");

    GbtModel model;
    model.features = features;
    model.loss = config.loss;
    model.learning_rate = config.learning_rate;
    model.base_score = config.loss == GbtLoss::squared ? ybar : std::log(ybar / (1.0 - ybar));

    std::vector<std::vector<double>> cuts(cols.size());
    std::vector<std::vector<std::uint8_t>> codes(cols.size(), std::vector<std::uint8_t>(n));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        cuts[j] = cut_points(cols[j], config.max_bins);
        for (std::size_t i = 0; i < n; ++i) {
            codes[j][i] = static_cast<std::uint8_t>(std::lower_bound(cuts[j].begin(), cuts[j].end(), cols[j][i]) -
                                                    cuts[j].begin());
        }
    }

    std::vector<double> f(n, model.base_score), r(n), h(n, 1.0);
    std::vector<double> x(cols.size());
    const auto sample_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.subsample * static_cast<double>(n))));
    model.training_loss.push_back(training_loss(config.loss, y, f));

    for (std::size_t t = 0; t < config.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (config.loss == GbtLoss::squared) {
                r[i] = y[i] - f[i];
            } else {
                const double p = stats::sigmoid(f[i]);
                r[i] = y[i] - p;
                h[i] = p * (1.0 - p);
            }
        }
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        if (sample_size < n) {
            auto stream = rng::Stream::derived(config.seed, kSubsampleStream, t);
            for (std::size_t i = 0; i < sample_size; ++i) {
                const auto j = i + static_cast<std::size_t>(stream.below(n - i));
                std::swap(rows[i], rows[j]);
            }
            rows.resize(sample_size);
            std::sort(rows.begin(), rows.end());
        }
        TreeBuilder builder(config, cuts, codes, r, h, f, y);
        model.trees.push_back(builder.build(std::move(rows)));
        const auto& tree = model.trees.back();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) x[j] = cols[j][i];
            f[i] += tree.evaluate(x);
        }
        model.training_loss.push_back(training_loss(config.loss, y, f));
    }
    return model;
}

}  // namespace causim
