#include "doctest.h"
#include "test_util.hpp"

#include "mgp/bench.hpp"
#include "mgp/hyperopt.hpp"
#include "mgp/model_io.hpp"

#include <cstring>
#include <algorithm>
#include <cmath>
#include <sstream>

using namespace mgp;
using mgp::test::TempDir;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

struct Fixture {
    Dataset data;
    NormalizationStats stats;
    BasisSet basis;
    Hyperparameters hyper;
    Eigen::MatrixXd test_points;

    Fixture() {
        SyntheticSpec spec;
        spec.kind = SyntheticKind::varfreq_sine;
        spec.n_points = 80;
        spec.noise_sigma = 0.05;
        spec.seed = 3;
        std::tie(data, stats) = normalize(generate(spec));
        hyper.sigma = 0.05;
        hyper.sigma_p = 1.3;
        hyper.scales = ScaleConfig{0.2, 0.5, 3, 0.5};
        basis = cluster_basis(data.inputs, hyper.scales, 11);
        Rng rng(5);
        test_points = test::uniform_matrix(rng, 100, 1, -0.1, 1.1);
    }
};

}  // namespace

TEST_CASE("method D model round trip is bit-identical") {
    const Fixture f;
    MethodDModel m = train_d(f.data, f.basis, f.hyper);
    m.norm = f.stats;
    std::istringstream in(serialize_model(m));
    const auto loaded = std::get<MethodDModel>(parse_model(in));
    CHECK(loaded.basis.levels == m.basis.levels);
    CHECK(loaded.train_count == m.train_count);
    CHECK(same_bits(loaded.lml, m.lml));
    CHECK(same_bits(loaded.norm.y_range, m.norm.y_range));
    for (Eigen::Index i = 0; i < f.test_points.rows(); ++i) {
        const Eigen::VectorXd q = f.test_points.row(i).transpose();
        const auto a = predict_d(m, q);
        const auto b = predict_d(loaded, q);
        CHECK(same_bits(a.mean, b.mean));
        CHECK(same_bits(a.variance, b.variance));
    }
}

TEST_CASE("method N model round trip is bit-identical") {
    const Fixture f;
    MethodNModel m = train_n(f.data, f.basis, f.hyper);
    m.norm = f.stats;
    TempDir dir("model");
    save_model(dir / "m.txt", m);
    const auto loaded = std::get<MethodNModel>(load_model(dir / "m.txt"));
    CHECK(loaded.training_inputs == m.training_inputs);
    for (Eigen::Index i = 0; i < f.test_points.rows(); ++i) {
        const Eigen::VectorXd q = f.test_points.row(i).transpose();
        const auto a = predict_n(m, q);
        const auto b = predict_n(loaded, q);
        CHECK(same_bits(a.mean, b.mean));
        CHECK(same_bits(a.variance, b.variance));
    }
}

TEST_CASE("serialization is stable") {
    const Fixture f;
    const auto m = train_d(f.data, f.basis, f.hyper);
    const std::string first = serialize_model(m);
    std::istringstream in(first);
    CHECK(serialize_model(parse_model(in)) == first);
    CHECK(first.rfind("mgp-model 1\nmethod D\n", 0) == 0);
}

TEST_CASE("comments are ignored") {
    const Fixture f;
    const std::string text = "# report line\n\n" + serialize_model(train_d(f.data, f.basis, f.hyper));
    std::istringstream in(text);
    CHECK_NOTHROW(parse_model(in));
}

TEST_CASE("malformed model files raise ParseError with a line number") {
    const Fixture f;
    const std::string good = serialize_model(train_d(f.data, f.basis, f.hyper));

    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_model(in);
    };
    SUBCASE("wrong version") {
        std::string bad = good;
        bad.replace(0, 11, "mgp-model 9");
        CHECK_THROWS_AS(parse(bad), ParseError);
    }
    SUBCASE("truncated") {
        try {
            parse(good.substr(0, good.size() / 2));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() > 0);
        }
    }
    SUBCASE("bad number") {
        std::string bad = good;
        const auto pos = bad.find("sigma ");
        bad.replace(pos, bad.find('\n', pos) - pos, "sigma abc");
        try {
            parse(bad);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 7);
        }
    }
    SUBCASE("invalid hyperparameter") {
        std::string bad = good;
        const auto pos = bad.find("gamma ");
        bad.replace(pos, bad.find('\n', pos) - pos, "gamma 2");
        CHECK_THROWS_AS(parse(bad), ParseError);
    }
    SUBCASE("unknown method") {
        std::string bad = good;
        bad.replace(bad.find("method D"), 8, "method Q");
        CHECK_THROWS_AS(parse(bad), ParseError);
    }
}

TEST_CASE("missing model file is an I/O error") {
    CHECK_THROWS_AS(load_model("/nonexistent/dir/model.txt"), IoError);
}
