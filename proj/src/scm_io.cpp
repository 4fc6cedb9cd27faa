#include "causim/scm_io.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "causim/error.hpp"

namespace causim {

namespace {

std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += fmt::format("{}{}", i ? " " : "", xs[i]);
    return out;
}

const char* noise_kind_name(NoiseSpec::Kind k) {
    switch (k) {
        case NoiseSpec::Kind::gaussian: return "gaussian";
        case NoiseSpec::Kind::uniform: return "uniform";
        case NoiseSpec::Kind::constant: return "constant";
    }
    return "";
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

double parse_number(const std::string& word, std::size_t line) {
    double v = 0.0;
    const auto* first = word.data();
    const auto* last = word.data() + word.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(fmt::format("line {}: '{}' is not a number", line, word));
    }
    return v;
}

}  // namespace

void write_model(std::ostream& out, const StructuralModel& model) {
    out << "# causim structural model\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& a = model.assignment(i);
        if (a.kind != StructuralAssignment::Kind::linear) {
            throw InvalidModelError("cannot serialize custom assignment of node '" +
                                    model.nodes()[i] + "'");
        }
        out << "node " << model.nodes()[i] << '\n';
        if (!a.parents.empty()) {
            out << "  parents";
            for (const auto& p : a.parents) out << ' ' << p;
            out << "\n  weights " << join_numbers(a.weights) << '\n';
        }
        out << fmt::format("  intercept {}\n", a.intercept);
        out << "  noise " << noise_kind_name(a.noise.kind);
        if (a.noise.kind == NoiseSpec::Kind::constant) {
            out << fmt::format(" {}\n", a.noise.a);
        } else {
            out << fmt::format(" {} {}\n", a.noise.a, a.noise.b);
        }
        out << fmt::format("  noise_scale {}\n", a.noise.scale);
    }
}

std::string format_model(const StructuralModel& model) {
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

StructuralModel read_model(std::istream& in) {
    ModelSpec spec;
    std::optional<std::string> node;
    StructuralAssignment current;
    bool have_weights = false;

    auto flush = [&](std::size_t line) {
        if (!node) return;
        if (!current.parents.empty() && !have_weights) {
            throw ParseError(fmt::format("line {}: node '{}' lists parents but no weights", line, *node));
        }
        spec.add(*node, current);
        node.reset();
        current = StructuralAssignment{};
        have_weights = false;
    };

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        const auto words = split_words(text);
        if (words.empty()) continue;
        const auto& key = words[0];

        if (key == "node") {
            if (words.size() != 2) throw ParseError(fmt::format("line {}: expected 'node <name>'", line));
            flush(line);
            node = words[1];
            continue;
        }
        if (!node) throw ParseError(fmt::format("line {}: '{}' outside a node block", line, key));

        if (key == "parents") {
            current.parents.assign(words.begin() + 1, words.end());
        } else if (key == "weights") {
            current.weights.clear();
            for (std::size_t i = 1; i < words.size(); ++i) {
                current.weights.push_back(parse_number(words[i], line));
            }
            have_weights = true;
        } else if (key == "intercept") {
            if (words.size() != 2) throw ParseError(fmt::format("line {}: expected 'intercept <value>'", line));
            current.intercept = parse_number(words[1], line);
        } else if (key == "noise") {
            if (words.size() < 2) throw ParseError(fmt::format("line {}: noise kind missing", line));
            const auto& kind = words[1];
            const double scale = current.noise.scale;
            if (kind == "constant" && words.size() == 3) {
                current.noise = NoiseSpec::constant(parse_number(words[2], line));
            } else if (kind == "gaussian" && words.size() == 4) {
                current.noise = NoiseSpec::gaussian(parse_number(words[2], line), parse_number(words[3], line));
            } else if (kind == "uniform" && words.size() == 4) {
                current.noise = NoiseSpec::uniform(parse_number(words[2], line), parse_number(words[3], line));
            } else {
                throw ParseError(fmt::format("line {}: bad noise specification", line));
            }
            current.noise.scale = scale;
        } else if (key == "noise_scale") {
            if (words.size() != 2) throw ParseError(fmt::format("line {}: expected 'noise_scale <value>'", line));
            current.noise.scale = parse_number(words[1], line);
        } else {
            throw ParseError(fmt::format("line {}: unknown key '{}'", line, key));
        }
    }
    flush(line);
    if (spec.entries().empty()) throw ParseError("model file declares no nodes");
    return validate_model(spec);
}

StructuralModel parse_model(const std::string& text) {
    std::istringstream in(text);
    return read_model(in);
}

}  // namespace causim
