#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "holoweight/config.hpp"
#include "holoweight/report.hpp"

using namespace hw;
using nlohmann::json;

namespace {

IdentityReport sample_report() {
    IdentityReport r;
    r.domain_id = "disc";
    r.k = 2;
    r.g_id = "conj_pow:1";
    r.eta_id = "exp";
    r.variant = "corrected";
    r.lhs = Complex(3.141592653589793, -0.25);
    r.lhs_source = LhsSource::ClosedForm;
    r.rhs = Complex(3.1415926535897936, -0.2500000000000004);
    r.rhs_error_estimate = 7.2e-13;
    r.abs_err = 4.9e-16;
    r.rel_err = 1.6e-16;
    r.quad_converged = true;
    r.pass = true;
    r.runtime_seconds = 0.734;
    return r;
}

}  // namespace

TEST_CASE("defaults describe the full standard matrix") {
    RunConfig cfg = default_config();
    CHECK(cfg.domain_id == "disc");
    CHECK(cfg.ks == std::vector<int>{1, 2, 3});
    CHECK(cfg.g_ids.size() == 4);
    CHECK(cfg.eta_ids.size() == 8);
    CHECK(cfg.variants == std::vector<std::string>{"corrected"});
    CHECK(cfg.tol_rel == 1e-8);
    CHECK(cfg.tol_rel_singular == 1e-4);
    CHECK(cfg.quad_rel_tol == 1e-10);
    CHECK(cfg.threads == 1);
    CHECK(cfg.seed == 1);
    CHECK(cfg.out_dir.empty());
    // defaults must themselves validate
    CHECK_NOTHROW((void)parse_config(""));
}

TEST_CASE("parser accepts the documented grammar") {
    std::string text =
        "# suite for the quick matrix\n"
        "domain = disc\n"
        "k = [1, 2]\n"
        "g = [one, \"conj_pow:1\"]\n"
        "eta = [const, pow:1]   # trailing comment\n"
        "variant = [corrected, bare_laplacian]\n"
        "tol_rel = 1e-9\n"
        "quad_rel_tol = 1e-11\n"
        "threads = 2\n"
        "seed = 42\n"
        "out_dir = \"runs/out dir\"\n";
    RunConfig cfg = parse_config(text);
    CHECK(cfg.ks == std::vector<int>{1, 2});
    CHECK(cfg.g_ids == std::vector<std::string>{"one", "conj_pow:1"});
    CHECK(cfg.eta_ids == std::vector<std::string>{"const", "pow:1"});
    CHECK(cfg.variants == std::vector<std::string>{"corrected", "bare_laplacian"});
    CHECK(cfg.tol_rel == 1e-9);
    CHECK(cfg.quad_rel_tol == 1e-11);
    CHECK(cfg.threads == 2);
    CHECK(cfg.seed == 42);
    CHECK(cfg.out_dir == "runs/out dir");

    SUBCASE("hash inside quotes is content, not a comment") {
        RunConfig c2 = parse_config("out_dir = \"a#b\"\n");
        CHECK(c2.out_dir == "a#b");
    }
}

TEST_CASE("parse errors carry the offending line number") {
    CHECK_THROWS_WITH_AS((void)parse_config("domain = disc\nnot a kv line\n"),
                         doctest::Contains("config line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("\n\nbogus_key = 3\n"),
                         doctest::Contains("unknown key 'bogus_key'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("tol_rel = 1e-9\ntol_rel = 1e-8\n"),
                         doctest::Contains("duplicate key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("tol_rel = fast\n"),
                         doctest::Contains("expected a number"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("k = 2\n"), doctest::Contains("expects a [list]"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("eta = [const,, exp]\n"),
                         doctest::Contains("empty list element"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("domain = \"disc\ntol_rel = 1\n"),
                         doctest::Contains("unterminated string"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("tol_rel =\n"), doctest::Contains("missing value"),
                         std::invalid_argument);
}

TEST_CASE("semantic validation resolves every referenced id eagerly") {
    CHECK_THROWS_WITH_AS((void)parse_config("domain = torus\n"),
                         doctest::Contains("unknown domain 'torus'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("eta = [wiggle]\n"), doctest::Contains("wiggle"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("g = [conj_pow:x]\n"),
                         doctest::Contains("conj_pow:x"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_config("variant = [literal]\n"),
                         doctest::Contains("literal"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_config("tol_rel = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_config("threads = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_config("k = [0]\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_config("k = [5]\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_config("base_rule = 1\n"), std::invalid_argument);
    // ball catalog has no rat2; the disc default eta list must be rejected there
    CHECK_THROWS_AS((void)parse_config("domain = ball\n"), std::invalid_argument);
    // monomial ids carry a comma, so the list grammar needs them quoted
    CHECK_THROWS_AS((void)parse_config("domain = ball\ng = [one]\neta = [const, mono:2,0]\n"),
                    std::invalid_argument);
    CHECK_NOTHROW((void)parse_config("domain = ball\ng = [one]\neta = [const, \"mono:2,0\"]\n"));
}

TEST_CASE("quadrature settings switch on the singular flag") {
    RunConfig cfg = default_config();
    cfg.quad_rel_tol = 1e-12;
    cfg.quad_rel_tol_singular = 1e-5;
    cfg.max_subdivisions = 77;
    cfg.base_rule = 12;
    auto smooth = quadrature_settings(cfg, false);
    CHECK(smooth.rel_tol == 1e-12);
    CHECK(smooth.max_subdivisions == 77);
    CHECK(smooth.base_rule == 12);
    auto singular = quadrature_settings(cfg, true);
    CHECK(singular.rel_tol == 1e-5);
    CHECK(singular.abs_tol == cfg.quad_abs_tol);
}

TEST_CASE("format_double is shortest form and round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(3.141592653589793) == "3.141592653589793");
    for (double v : {7.2e-13, 1.0 / 3.0, 6.02e23, -1.6e-16}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("identity reports round-trip through json exactly") {
    IdentityReport r = sample_report();
    json j = report_to_json(r);
    IdentityReport back = report_from_json(j);
    CHECK(back.domain_id == r.domain_id);
    CHECK(back.k == r.k);
    CHECK(back.g_id == r.g_id);
    CHECK(back.eta_id == r.eta_id);
    CHECK(back.variant == r.variant);
    CHECK(back.lhs == r.lhs);
    CHECK(back.lhs_source == r.lhs_source);
    CHECK(back.rhs == r.rhs);
    CHECK(back.rhs_error_estimate == r.rhs_error_estimate);
    CHECK(back.abs_err == r.abs_err);
    CHECK(back.rel_err == r.rel_err);
    CHECK(back.quad_converged == r.quad_converged);
    CHECK(back.pass == r.pass);
    CHECK(back.runtime_seconds == r.runtime_seconds);

    json j2 = report_to_json(back);
    CHECK(j == j2);
}

TEST_CASE("suite json carries schema, config echo, and summary") {
    RunConfig cfg = default_config();
    cfg.threads = 7;
    cfg.out_dir = "/tmp/somewhere";
    SuiteResult res;
    res.cells = {sample_report(), sample_report()};
    res.cells[1].pass = false;
    res.cells[1].eta_id = "rat2";
    res.passed = 1;
    res.failed = 1;
    res.all_pass = false;

    json j = suite_to_json(cfg, res);
    CHECK(j.at("schema_version") == "1");
    CHECK(j.at("results").size() == 2);
    CHECK(j.at("summary").at("total") == 2);
    CHECK(j.at("summary").at("passed") == 1);
    CHECK(j.at("summary").at("failed") == 1);
    CHECK(j.at("summary").at("all_pass") == false);
    // execution details are not results
    CHECK_FALSE(j.at("config").contains("threads"));
    CHECK_FALSE(j.at("config").contains("out_dir"));
    CHECK(j.at("config").at("seed") == 1);
    CHECK(j.at("config").at("tol_rel") == 1e-8);
}

TEST_CASE("csv has the fixed 12-column layout") {
    SuiteResult res;
    res.cells = {sample_report()};
    res.passed = 1;
    res.all_pass = true;
    std::string csv = suite_to_csv(res);
    auto nl = csv.find('\n');
    REQUIRE(nl != std::string::npos);
    CHECK(csv.substr(0, nl) ==
          "domain,k,g,eta,variant,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,pass");
    std::string row = csv.substr(nl + 1);
    CHECK(row.find("disc,2,conj_pow:1,exp,corrected,") == 0);
    CHECK(row.find(",true\n") != std::string::npos);
    int commas = 0;
    for (char c : row)
        if (c == ',') ++commas;
    CHECK(commas == 11);
    // runtimes must never leak into the csv
    CHECK(csv.find("0.734") == std::string::npos);
}

TEST_CASE("strip_runtimes removes timings everywhere and is idempotent") {
    RunConfig cfg = default_config();
    SuiteResult res;
    res.cells = {sample_report(), sample_report()};
    res.cells[1].runtime_seconds = 123.456;
    res.passed = 2;
    res.all_pass = true;
    std::string text = suite_to_json(cfg, res).dump(2) + "\n";
    std::string stripped = strip_runtimes(text);
    CHECK(stripped.find("runtime_seconds") == std::string::npos);
    CHECK(stripped.find("123.456") == std::string::npos);
    CHECK(strip_runtimes(stripped) == stripped);
    // the numeric payload survives
    json j = json::parse(stripped);
    CHECK(j.at("results").size() == 2);
    CHECK(j.at("results").at(0).at("rhs_error_estimate") == 7.2e-13);
}

TEST_CASE("reports are written to disk as suite.json and suite.csv") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "hw_report_test";
    fs::remove_all(dir);

    RunConfig cfg = default_config();
    SuiteResult res;
    res.cells = {sample_report()};
    res.passed = 1;
    res.all_pass = true;
    emit_reports(cfg, res, dir.string());

    std::string jtext = read_text_file((dir / "suite.json").string());
    std::string ctext = read_text_file((dir / "suite.csv").string());
    CHECK(json::parse(jtext).at("schema_version") == "1");
    CHECK(ctext.rfind("domain,k,", 0) == 0);

    SUBCASE("text files round-trip bytes") {
        fs::path f = dir / "nested" / "blob.txt";
        std::string payload = "line1\nline2 with \"quotes\"\n";
        write_text_file(f.string(), payload);
        CHECK(read_text_file(f.string()) == payload);
        CHECK_THROWS_AS((void)read_text_file((dir / "missing.txt").string()),
                        std::runtime_error);
    }
    fs::remove_all(dir);
}

TEST_CASE("config files load from disk with the same strictness") {
    namespace fs = std::filesystem;
    fs::path f = fs::temp_directory_path() / "hw_cfg_test.cfg";
    write_text_file(f.string(), "k = [1]\ng = [one]\neta = [const]\n");
    RunConfig cfg = load_config_file(f.string());
    CHECK(cfg.ks == std::vector<int>{1});
    CHECK_THROWS_AS((void)load_config_file("/nonexistent/place/x.cfg"), std::runtime_error);
    fs::remove(f);
}
