#include "causim/model_io.hpp"

#include <fstream>

#include "causim/error.hpp"

namespace causim {

using nlohmann::ordered_json;

namespace {

const ordered_json& member(const ordered_json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("model document lacks '") + key + "'");
    return doc.at(key);
}

template <typename T>
T field(const ordered_json& doc, const char* key) {
    member(doc, key);
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model field '") + key + "': " + e.what());
    }
}

void expect_kind(const ordered_json& doc, const char* kind) {
    const auto k = field<std::string>(doc, "kind");
    if (k != kind) throw ParseError("expected model kind '" + std::string(kind) + "', found '" + k + "'");
}

}  // namespace

ordered_json mlp_to_json(const MlpModel& model) {
    ordered_json doc;
    doc["kind"] = "mlp";
    doc["features"] = model.features;
    doc["layer_sizes"] = model.layer_sizes;
    doc["activation"] = to_string(model.activation);
    doc["output"] = to_string(model.output);
    doc["input_mean"] = model.input_mean;
    doc["input_scale"] = model.input_scale;
    doc["output_mean"] = model.output_mean;
    doc["output_scale"] = model.output_scale;
    ordered_json layers = ordered_json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const auto& w = model.weights[l];
        ordered_json rows = ordered_json::array();
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(w.cols()));
            for (Eigen::Index c = 0; c < w.cols(); ++c) row[static_cast<std::size_t>(c)] = w(r, c);
            rows.push_back(row);
        }
        const auto& b = model.biases[l];
        ordered_json layer;
        layer["weights"] = std::move(rows);
        layer["bias"] = std::vector<double>(b.data(), b.data() + b.size());
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

MlpModel mlp_from_json(const ordered_json& doc) {
    expect_kind(doc, "mlp");
    MlpModel m;
    m.features = field<std::vector<std::string>>(doc, "features");
    m.layer_sizes = field<std::vector<std::size_t>>(doc, "layer_sizes");
    try {
        m.activation = parse_activation(field<std::string>(doc, "activation"));
        m.output = parse_output_kind(field<std::string>(doc, "output"));
    } catch (const InvalidConfigError& e) {
        throw ParseError(e.what());
    }
    m.input_mean = field<std::vector<double>>(doc, "input_mean");
    m.input_scale = field<std::vector<double>>(doc, "input_scale");
    m.output_mean = field<double>(doc, "output_mean");
    m.output_scale = field<double>(doc, "output_scale");
    const auto& layers = member(doc, "layers");
    if (!layers.is_array()) throw ParseError("'layers' must be an array");
    for (const auto& layer : layers) {
        const auto rows = field<std::vector<std::vector<double>>>(layer, "weights");
        const auto bias = field<std::vector<double>>(layer, "bias");
        const auto n_rows = static_cast<Eigen::Index>(rows.size());
        const auto n_cols = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
        Eigen::MatrixXd w(n_rows, n_cols);
        for (Eigen::Index r = 0; r < n_rows; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (static_cast<Eigen::Index>(row.size()) != n_cols) throw ParseError("ragged weight matrix");
            for (Eigen::Index c = 0; c < n_cols; ++c) w(r, c) = row[static_cast<std::size_t>(c)];
        }
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
    m.validate();
    return m;
}

ordered_json gbt_to_json(const GbtModel& model) {
    ordered_json doc;
    doc["kind"] = "gbt";
    doc["features"] = model.features;
    doc["loss"] = to_string(model.loss);
    doc["learning_rate"] = model.learning_rate;
    doc["base_score"] = model.base_score;
    ordered_json trees = ordered_json::array();
    for (const auto& t : model.trees) {
        ordered_json nodes = ordered_json::array();
        for (const auto& n : t.nodes) {
            ordered_json node;
            if (n.is_leaf()) {
                node["value"] = n.value;
            } else {
                node["feature"] = n.feature;
                node["threshold"] = n.threshold;
                node["left"] = n.left;
                node["right"] = n.right;
            }
            nodes.push_back(std::move(node));
        }
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
    return doc;
}

GbtModel gbt_from_json(const ordered_json& doc) {
    expect_kind(doc, "gbt");
    GbtModel m;
    m.features = field<std::vector<std::string>>(doc, "features");
    try {
        m.loss = parse_gbt_loss(field<std::string>(doc, "loss"));
    } catch (const InvalidConfigError& e) {
        throw ParseError(e.what());
    }
    m.learning_rate = field<double>(doc, "learning_rate");
    m.base_score = field<double>(doc, "base_score");
    const auto& trees = member(doc, "trees");
    if (!trees.is_array()) throw ParseError("'trees' must be an array");
    for (const auto& t : trees) {
        if (!t.is_array()) throw ParseError("each tree must be an array of nodes");
        RegressionTree tree;
        for (const auto& node : t) {
            TreeNode n;
            if (node.contains("value")) {
                n.value = field<double>(node, "value");
            } else {
                n.feature = field<int>(node, "feature");
                n.threshold = field<double>(node, "threshold");
                n.left = field<int>(node, "left");
                n.right = field<int>(node, "right");
                if (n.feature < 0) throw ParseError("negative feature index in tree node");
            }
            tree.nodes.push_back(n);
        }
        m.trees.push_back(std::move(tree));
    }
    m.validate();
    return m;
}

void save_json(const std::string& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

ordered_json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

}  // namespace causim
