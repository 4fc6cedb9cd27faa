#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "causim/error.hpp"
#include "causim/model_io.hpp"
#include "support.hpp"

using namespace causim;

namespace {

Dataset regression_data() {
    auto d = testing::normal_columns({"a", "b"}, 200, 40);
    std::vector<double> y(200);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(d.column("a")[i]) - 0.5 * d.column("b")[i];
    d.add_column("y", y);
    return d;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "causim_model_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("MLP round trip reproduces predictions exactly") {
    const auto d = regression_data();
    MlpConfig c;
    c.hidden = {6, 3};
    c.epochs = 300;
    const auto m = mlp_train(d, "y", {"a", "b"}, c);
    const auto doc = mlp_to_json(m);
    CHECK(doc["kind"] == "mlp");
    const auto back = mlp_from_json(doc);
    CHECK(back.predict(d) == m.predict(d));
    CHECK(mlp_to_json(back) == doc);

    const auto path = temp_file("mlp.json").string();
    save_json(path, doc);
    CHECK(mlp_from_json(load_json(path)).predict(d) == m.predict(d));
}

TEST_CASE("GBT round trip reproduces predictions exactly") {
    const auto d = regression_data();
    GbtConfig c;
    c.n_trees = 25;
    const auto m = gbt_train(d, "y", {"a", "b"}, c);
    const auto doc = gbt_to_json(m);
    const auto back = gbt_from_json(doc);
    CHECK(back.predict(d) == m.predict(d));
    CHECK(gbt_to_json(back) == doc);

    const auto path = temp_file("gbt.json").string();
    save_json(path, doc);
    CHECK(gbt_from_json(load_json(path)).predict(d) == m.predict(d));
}

TEST_CASE("malformed documents are rejected") {
    const auto d = regression_data();
    GbtConfig c;
    c.n_trees = 3;
    const auto g = gbt_to_json(gbt_train(d, "y", {"a", "b"}, c));
    CHECK_THROWS_AS(mlp_from_json(g), ParseError);
    auto no_trees = g;
    no_trees.erase("trees");
    CHECK_THROWS_AS(gbt_from_json(no_trees), ParseError);
    auto bad_feature = g;
    bad_feature["trees"][0][0]["feature"] = 7;
    CHECK_THROWS_AS(gbt_from_json(bad_feature), InvalidModelError);
    auto bad_type = g;
    bad_type["learning_rate"] = "fast";
    CHECK_THROWS_AS(gbt_from_json(bad_type), ParseError);

    MlpConfig mc;
    mc.epochs = 1;
    auto mdoc = mlp_to_json(mlp_train(d, "y", {"a", "b"}, mc));
    auto ragged = mdoc;
    ragged["layers"][0]["weights"][0].push_back(1.0);
    CHECK_THROWS_AS(mlp_from_json(ragged), ParseError);
    auto scale = mdoc;
    scale["output_scale"] = -1.0;
    CHECK_THROWS_AS(mlp_from_json(scale), InvalidModelError);

    CHECK_THROWS_AS(load_json("/nonexistent/dir/model.json"), IoError);
    const auto junk = temp_file("junk.json");
    std::ofstream(junk) << "{ not json";
    CHECK_THROWS_AS(load_json(junk.string()), ParseError);
}

}
