#include "doctest.h"
#include "test_util.hpp"

#include "mgp/cli.hpp"
#include "mgp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace mgp;
using mgp::test::read_file;
using mgp::test::TempDir;
using mgp::test::write_file;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "mgp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string report_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    for (std::string line; std::getline(in, line);)
        if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
    return {};
}

}  // namespace

TEST_CASE("generate writes the requested number of rows deterministically") {
    TempDir dir("cli");
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    CHECK(run({"generate", "--kind", "step", "--n", "128", "--noise", "0.01", "--seed", "7", "--out", a}).code == 0);
    CHECK(run({"generate", "--kind", "step", "--n", "128", "--noise", "0.01", "--seed", "7", "--out", b}).code == 0);
    CHECK(count_lines(read_file(a)) == 128);
    CHECK(read_file(a) == read_file(b));
    CHECK(load_csv(a).count() == 128);
}

TEST_CASE("generate rejects sizes beyond the grid and unknown kinds") {
    CHECK(run({"generate", "--n", "20000", "--kind", "step"}).code == 1);
    CHECK(run({"generate", "--kind", "triangle"}).code == 1);
    CHECK(run({"generate", "--n", "abc"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cluster emits coordinates, scale and source row") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    const auto centers = dir / "c.csv";
    REQUIRE(run({"generate", "--kind", "sine", "--n", "200", "--seed", "1", "--out", data}).code == 0);
    const auto r = run({"cluster", "--input", data, "--h1", "0.2", "--beta", "0.5", "--S", "3", "--gamma", "0.5",
                        "--seed", "4", "--out", centers});
    REQUIRE(r.code == 0);
    const Dataset d = load_csv(data);
    const Eigen::MatrixXd c = load_matrix_csv(centers);
    REQUIRE(c.cols() == 3);
    CHECK(report_value(r.out, "D") == std::to_string(c.rows()));
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const auto row = static_cast<Eigen::Index>(c(i, 2));
        CHECK(c(i, 0) == d.inputs(row, 0));
        CHECK(c(i, 1) >= 1);
        CHECK(c(i, 1) <= 3);
    }
}

TEST_CASE("train and predict round trip") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    const auto model = dir / "m.txt";
    const auto pred = dir / "p.csv";
    REQUIRE(run({"generate", "--kind", "step", "--n", "128", "--noise", "0.01", "--seed", "3", "--out", data}).code ==
            0);
    const auto t = run({"train", "--input", data, "--optimize", "--seed", "3", "--out", model});
    REQUIRE(t.code == 0);
    const long basis = std::stol(report_value(t.out, "D"));
    CHECK(basis < 128);
    CHECK(std::isfinite(std::stod(report_value(t.out, "lml"))));
    CHECK(!report_value(t.out, "k_1").empty());
    CHECK(!report_value(t.out, "jitter").empty());
    CHECK(read_file(model).rfind("# method D", 0) == 0);

    const auto p = run({"predict", "--model", model, "--input", data, "--out", pred, "--with-variance"});
    REQUIRE(p.code == 0);
    const Eigen::MatrixXd out = load_matrix_csv(pred);
    REQUIRE(out.rows() == 128);
    REQUIRE(out.cols() == 3);
    CHECK((out.col(2).array() > 0.0).all());

    // Identical flags give identical primary outputs.
    const auto model2 = dir / "m2.txt";
    REQUIRE(run({"train", "--input", data, "--optimize", "--seed", "3", "--out", model2}).code == 0);
    CHECK(read_file(model) == read_file(model2));
}

TEST_CASE("both methods report the same likelihood") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    REQUIRE(run({"generate", "--kind", "sine", "--n", "150", "--noise", "0.05", "--seed", "2", "--out", data}).code ==
            0);
    const auto d = run({"train", "--input", data, "--method", "D", "--S", "2", "--h1", "0.1", "--sigma", "0.05"});
    const auto n = run({"train", "--input", data, "--method", "N", "--S", "2", "--h1", "0.1", "--sigma", "0.05"});
    REQUIRE(d.code == 0);
    REQUIRE(n.code == 0);
    CHECK(std::abs(std::stod(report_value(d.out, "lml")) - std::stod(report_value(n.out, "lml"))) <= 1e-6);
    CHECK(report_value(d.out, "D") == report_value(n.out, "D"));
}

TEST_CASE("a radius below the minimum gap keeps every point") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    REQUIRE(run({"generate", "--kind", "step", "--n", "50", "--seed", "1", "--out", data}).code == 0);
    // Grid spacing is 1e-4 before normalization, so gamma * h1 = 1e-6 is far below any gap.
    const auto t = run({"train", "--input", data, "--h1", "0.01", "--gamma", "0.0001"});
    REQUIRE(t.code == 0);
    CHECK(report_value(t.out, "D") == "50");
}

TEST_CASE("noiseless interpolation reproduces the training targets") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    const auto model = dir / "m.txt";
    const auto pred = dir / "p.csv";
    REQUIRE(run({"generate", "--kind", "sine", "--n", "300", "--noise", "0", "--seed", "5", "--out", data}).code == 0);
    REQUIRE(run({"train", "--input", data, "--h1", "0.03", "--gamma", "0.3", "--sigma", "0.001", "--out", model})
                .code == 0);
    REQUIRE(run({"predict", "--model", model, "--input", data, "--out", pred}).code == 0);
    const Dataset d = load_csv(data);
    const Eigen::MatrixXd p = load_matrix_csv(pred);
    CHECK(normalized_error(p.col(1), d.targets) < 0.1);
}

TEST_CASE("predict edge cases") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    const auto model = dir / "m.txt";
    REQUIRE(run({"generate", "--n", "40", "--out", data}).code == 0);
    REQUIRE(run({"train", "--input", data, "--out", model}).code == 0);

    write_file(dir / "empty.csv", "");
    const auto pred = dir / "p.csv";
    CHECK(run({"predict", "--model", model, "--input", dir / "empty.csv", "--out", pred}).code == 0);
    CHECK(read_file(pred).empty());

    write_file(dir / "wide.csv", "0.1,0.2,0.3,0.4\n");
    const auto wide = run({"predict", "--model", model, "--input", dir / "wide.csv"});
    CHECK(wide.code == 1);
    CHECK(wide.err.find("expects 1 input column") != std::string::npos);

    write_file(dir / "inputs.csv", "0.25\n0.75\n");
    const auto ok = run({"predict", "--model", model, "--input", dir / "inputs.csv"});
    CHECK(ok.code == 0);
    CHECK(count_lines(ok.out) == 2);

    CHECK(run({"predict", "--model", dir / "missing.txt", "--input", data}).code == 2);
    write_file(dir / "broken.txt", "mgp-model 1\nmethod X\n");
    CHECK(run({"predict", "--model", dir / "broken.txt", "--input", data}).code == 1);
    write_file(dir / "bad.csv", "0.1,zz\n");
    CHECK(run({"train", "--input", dir / "bad.csv"}).code == 1);
    CHECK(run({"train", "--input", dir / "none.csv"}).code == 2);
    CHECK(run({"train", "--input", data, "--method", "Z"}).code == 1);
    CHECK(run({"train", "--input", data, "--gamma", "1.5"}).code == 1);
}

TEST_CASE("numerical failure maps to exit code 3") {
    TempDir dir("cli");
    const auto data = dir / "d.csv";
    // The prior variance overflows, so the kernel matrix is not finite.
    write_file(data, "0,0\n0.5,1\n1,1\n");
    const auto r = run({"train", "--input", data, "--method", "N", "--sigma-p", "1e200"});
    CHECK(r.code == 3);
}

TEST_CASE("bench equivalence writes a CSV report") {
    TempDir dir("cli");
    const auto csv = dir / "eq.csv";
    const auto r = run({"bench", "--experiment", "equivalence", "--instances", "10", "--csv", csv});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("max_lml_abs") != std::string::npos);
    CHECK(read_file(csv).rfind("experiment,model,N,D", 0) == 0);
    CHECK(run({"bench", "--experiment", "nope", "--csv", csv}).code == 1);
}

TEST_CASE("bench scaling reports exponent fits") {
    TempDir dir("cli");
    const auto csv = dir / "sc.csv";
    const auto r =
        run({"bench", "--experiment", "scaling", "--sizes", "64", "128", "--reps", "1", "--max-test-points", "50",
             "--csv", csv});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("fit train method D") != std::string::npos);
    CHECK(count_lines(read_file(csv)) == 1 + 4 + 6);
}
