#include "causim/mlp.hpp"

#include <cmath>
#include <limits>

#include "causim/error.hpp"
#include "causim/rng.hpp"
#include "causim/stats.hpp"
#include "features.hpp"

namespace causim {

namespace {

constexpr std::uint64_t kInitStream = 0x4D4C50;
constexpr double kDivergenceFactor = 1e6;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Forward {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> post;  // post[0] = inputs, post[l+1] = act(pre[l]) for hidden layers
};

Forward forward(const MlpModel& m, const Eigen::MatrixXd& inputs) {
    Forward f;
    const std::size_t layers = m.weights.size();
    f.post.reserve(layers);
    f.pre.reserve(layers);
    f.post.push_back(inputs);
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = m.weights[l] * f.post.back();
        z.colwise() += m.biases[l];
        f.pre.push_back(std::move(z));
        if (l + 1 < layers) {
            const auto& zl = f.pre.back();
            f.post.push_back(m.activation == Activation::tanh ? Eigen::MatrixXd(zl.array().tanh())
                                                               : Eigen::MatrixXd(zl.array().max(0.0)));
        }
    }
    return f;
}

void check_features(const std::vector<std::string>& features) {
    if (features.empty()) throw InvalidConfigError("network needs at least one feature");
}

Eigen::MatrixXd scaled_inputs(const MlpModel& m, const std::vector<std::span<const double>>& cols, std::size_t n) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(cols.size()), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                (cols[j][i] - m.input_mean[j]) / m.input_scale[j];
        }
    }
    return x;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }
std::string to_string(OutputKind o) { return o == OutputKind::identity ? "identity" : "logistic"; }
std::string to_string(Optimizer o) { return o == Optimizer::gradient_descent ? "gd" : "adam"; }

Activation parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    throw InvalidConfigError("unknown activation '" + std::string(s) + "'");
}

OutputKind parse_output_kind(std::string_view s) {
    if (s == "identity") return OutputKind::identity;
    if (s == "logistic") return OutputKind::logistic;
    throw InvalidConfigError("unknown output kind '" + std::string(s) + "'");
}

Optimizer parse_optimizer(std::string_view s) {
    if (s == "gd") return Optimizer::gradient_descent;
    if (s == "adam") return Optimizer::adam;
    throw InvalidConfigError("unknown optimizer '" + std::string(s) + "'");
}

void MlpConfig::validate() const {
    if (hidden.empty()) throw InvalidConfigError("network needs at least one hidden layer");
    for (auto h : hidden) {
        if (h == 0) throw InvalidConfigError("hidden layer width must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidConfigError("learning rate must be positive and finite");
    }
}

std::size_t MlpModel::n_parameters() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        total += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    }
    return total;
}

void MlpModel::validate() const {
    if (layer_sizes.size() < 2) throw InvalidModelError("network needs input and output layers");
    if (layer_sizes.front() != features.size()) throw InvalidModelError("input width differs from feature count");
    if (layer_sizes.back() != 1) throw InvalidModelError("network must have a single output");
    if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
        throw InvalidModelError("layer count mismatch");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(layer_sizes[l]);
        const auto out = static_cast<Eigen::Index>(layer_sizes[l + 1]);
        if (weights[l].rows() != out || weights[l].cols() != in || biases[l].size() != out) {
            throw InvalidModelError("layer " + std::to_string(l) + " has inconsistent shape");
        }
        if (!weights[l].allFinite() || !biases[l].allFinite()) {
            throw InvalidModelError("layer " + std::to_string(l) + " has non-finite parameters");
        }
    }
    if (input_mean.size() != features.size() || input_scale.size() != features.size()) {
        throw InvalidModelError("input scaling size mismatch");
    }
    for (double s : input_scale) {
        if (!(s > 0.0) || !std::isfinite(s)) throw InvalidModelError("input scale must be positive");
    }
    if (!(output_scale > 0.0) || !std::isfinite(output_scale) || !std::isfinite(output_mean)) {
        throw InvalidModelError("output scaling must be finite with positive scale");
    }
}

double MlpModel::predict_row(std::span<const double> x) const {
    if (x.size() != features.size()) throw InvalidArgumentError("row width differs from feature count");
    Eigen::VectorXd a(static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) a(static_cast<Eigen::Index>(j)) = (x[j] - input_mean[j]) / input_scale[j];
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Eigen::VectorXd z = weights[l] * a + biases[l];
        if (l + 1 < weights.size()) {
            a = activation == Activation::tanh ? Eigen::VectorXd(z.array().tanh()) : Eigen::VectorXd(z.array().max(0.0));
        } else {
            a = std::move(z);
        }
    }
    const double out = a(0);
    return output == OutputKind::logistic ? stats::sigmoid(out) : out * output_scale + output_mean;
}

std::vector<double> MlpModel::predict(const Dataset& data) const {
    const auto cols = detail::feature_columns(data, features);
    const std::size_t n = data.n_rows();
    const auto x = scaled_inputs(*this, cols, n);
    const auto f = forward(*this, x);
    const auto& z = f.pre.back();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = z(0, static_cast<Eigen::Index>(i));
        out[i] = output == OutputKind::logistic ? stats::sigmoid(v) : v * output_scale + output_mean;
    }
    return out;
}

MlpModel mlp_init(std::vector<std::string> features, const MlpConfig& config) {
    config.validate();
    check_features(features);
    MlpModel m;
    m.activation = config.activation;
    m.output = config.output;
    m.layer_sizes.push_back(features.size());
    m.layer_sizes.insert(m.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
    m.layer_sizes.push_back(1);
    m.input_mean.assign(features.size(), 0.0);
    m.input_scale.assign(features.size(), 1.0);
    m.features = std::move(features);

    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(m.layer_sizes[l]);
        const auto out = static_cast<Eigen::Index>(m.layer_sizes[l + 1]);
        auto stream = rng::Stream::derived(config.seed, kInitStream, l);
        const double sd = 1.0 / std::sqrt(static_cast<double>(in));
        Eigen::MatrixXd w(out, in);
        for (Eigen::Index c = 0; c < in; ++c) {
            for (Eigen::Index r = 0; r < out; ++r) w(r, c) = stream.normal(0.0, sd);
        }
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(out));
    }
    return m;
}

std::vector<double> get_parameters(const MlpModel& model) {
    std::vector<double> p;
    p.reserve(model.n_parameters());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const auto& w = model.weights[l];
        p.insert(p.end(), w.data(), w.data() + w.size());
        const auto& b = model.biases[l];
        p.insert(p.end(), b.data(), b.data() + b.size());
    }
    return p;
}

void set_parameters(MlpModel& model, std::span<const double> params) {
    if (params.size() != model.n_parameters()) throw InvalidArgumentError("parameter vector has wrong length");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto& w = model.weights[l];
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.data());
        pos += static_cast<std::size_t>(w.size());
        auto& b = model.biases[l];
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), b.size(), b.data());
        pos += static_cast<std::size_t>(b.size());
    }
}

LossGradient mlp_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    const auto n = inputs.cols();
    if (n == 0 || targets.size() != n) throw InvalidArgumentError("inputs and targets must be non-empty and aligned");
    if (inputs.rows() != static_cast<Eigen::Index>(model.layer_sizes.front())) {
        throw InvalidArgumentError("input rows differ from network input width");
    }
    const auto f = forward(model, inputs);
    const Eigen::RowVectorXd out = f.pre.back().row(0);
    const double inv_n = 1.0 / static_cast<double>(n);

    LossGradient lg;
    Eigen::MatrixXd delta(1, n);
    if (model.output == OutputKind::identity) {
        const Eigen::RowVectorXd r = out - targets.transpose();
        lg.loss = r.squaredNorm() * inv_n;
        delta.row(0) = 2.0 * inv_n * r;
    } else {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            loss += softplus(out(i)) - targets(i) * out(i);
            delta(0, i) = (stats::sigmoid(out(i)) - targets(i)) * inv_n;
        }
        lg.loss = loss * inv_n;
    }

    const std::size_t layers = model.weights.size();
    std::vector<Eigen::MatrixXd> dw(layers);
    std::vector<Eigen::VectorXd> db(layers);
    for (std::size_t l = layers; l-- > 0;) {
        dw[l] = delta * f.post[l].transpose();
        db[l] = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = model.weights[l].transpose() * delta;
        if (model.activation == Activation::tanh) {
            back.array() *= 1.0 - f.post[l].array().square();
        } else {
            back.array() *= (f.pre[l - 1].array() > 0.0).cast<double>();
        }
        delta = std::move(back);
    }
    lg.gradient.reserve(model.n_parameters());
    for (std::size_t l = 0; l < layers; ++l) {
        lg.gradient.insert(lg.gradient.end(), dw[l].data(), dw[l].data() + dw[l].size());
        lg.gradient.insert(lg.gradient.end(), db[l].data(), db[l].data() + db[l].size());
    }
    return lg;
}

Eigen::MatrixXd mlp_scaled_inputs(const MlpModel& model, const Dataset& data) {
    return scaled_inputs(model, detail::feature_columns(data, model.features), data.n_rows());
}

Eigen::VectorXd mlp_scaled_targets(const MlpModel& model, const Dataset& data, std::string_view target) {
    const auto y = data.column(target);
    Eigen::VectorXd t(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        t(static_cast<Eigen::Index>(i)) =
            model.output == OutputKind::logistic ? y[i] : (y[i] - model.output_mean) / model.output_scale;
    }
    return t;
}

MlpModel mlp_train(const Dataset& train, std::string_view target, const std::vector<std::string>& features,
                   const MlpConfig& config) {
    config.validate();
    check_features(features);
    const auto cols = detail::feature_columns(train, features);
    const auto y = train.column(target);
    const std::size_t n = train.n_rows();
    for (const auto& c : cols) {
        for (double v : c) {
            if (!std::isfinite(v)) throw InvalidArgumentError("network inputs must be finite");
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw InvalidArgumentError("network target must be finite");
        if (config.output == OutputKind::logistic && v != 0.0 && v != 1.0) {
            throw NonBinaryTargetError("logistic output needs a 0/1 target");
        }
    }

    MlpModel m = mlp_init(features, config);
    if (config.standardize) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            m.input_mean[j] = stats::mean(cols[j]);
            const double sd = n > 1 ? std::sqrt(stats::variance(cols[j])) : 0.0;
            m.input_scale[j] = sd > 0.0 ? sd : 1.0;
        }
        if (config.output == OutputKind::identity) {
            m.output_mean = stats::mean(y);
            const double sd = n > 1 ? std::sqrt(stats::variance(y)) : 0.0;
            m.output_scale = sd > 0.0 ? sd : 1.0;
        }
    }

    const auto x = scaled_inputs(m, cols, n);
    const auto t = mlp_scaled_targets(m, train, target);
    auto theta = get_parameters(m);
    const std::size_t p = theta.size();
    std::vector<double> m1(p, 0.0), m2(p, 0.0);
    double beta1_t = 1.0, beta2_t = 1.0;

    m.training_loss.reserve(config.epochs + 1);
    double initial = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t epoch = 0;; ++epoch) {
        const auto lg = mlp_loss_gradient(m, x, t);
        if (epoch == 0) initial = lg.loss;
        if (!std::isfinite(lg.loss) || lg.loss > kDivergenceFactor * std::max(initial, 1e-12)) {
            throw DivergenceError("training loss " + std::to_string(lg.loss) + " at epoch " + std::to_string(epoch) +
                                  " exceeds 1e6 x initial loss " + std::to_string(initial));
        }
        m.training_loss.push_back(lg.loss);
        if (epoch == config.epochs) break;

        if (config.optimizer == Optimizer::gradient_descent) {
            for (std::size_t k = 0; k < p; ++k) theta[k] -= config.learning_rate * lg.gradient[k];
        } else {
            beta1_t *= kAdamBeta1;
            beta2_t *= kAdamBeta2;
            for (std::size_t k = 0; k < p; ++k) {
                const double g = lg.gradient[k];
                m1[k] = kAdamBeta1 * m1[k] + (1.0 - kAdamBeta1) * g;
                m2[k] = kAdamBeta2 * m2[k] + (1.0 - kAdamBeta2) * g * g;
                const double mhat = m1[k] / (1.0 - beta1_t);
                const double vhat = m2[k] / (1.0 - beta2_t);
                theta[k] -= config.learning_rate * mhat / (std::sqrt(vhat) + kAdamEpsilon);
            }
        }
        set_parameters(m, theta);
    }
    return m;
}

}  // namespace causim
