#include "holoweight/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace hw {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json report_to_json(const IdentityReport& r) {
    return json{{"domain", r.domain_id},
                {"k", r.k},
                {"g", r.g_id},
                {"eta", r.eta_id},
                {"variant", r.variant},
                {"lhs_re", r.lhs.real()},
                {"lhs_im", r.lhs.imag()},
                {"lhs_source", lhs_source_name(r.lhs_source)},
                {"rhs_re", r.rhs.real()},
                {"rhs_im", r.rhs.imag()},
                {"rhs_error_estimate", r.rhs_error_estimate},
                {"abs_err", r.abs_err},
                {"rel_err", r.rel_err},
                {"quad_converged", r.quad_converged},
                {"pass", r.pass},
                {"runtime_seconds", r.runtime_seconds}};
}

IdentityReport report_from_json(const json& j) {
    IdentityReport r;
    r.domain_id = j.at("domain").get<std::string>();
    r.k = j.at("k").get<int>();
    r.g_id = j.at("g").get<std::string>();
    r.eta_id = j.at("eta").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.lhs = Complex(j.at("lhs_re").get<double>(), j.at("lhs_im").get<double>());
    r.lhs_source = j.at("lhs_source").get<std::string>() == "closed_form"
                       ? LhsSource::ClosedForm
                       : LhsSource::OracleQuadrature;
    r.rhs = Complex(j.at("rhs_re").get<double>(), j.at("rhs_im").get<double>());
    r.rhs_error_estimate = j.at("rhs_error_estimate").get<double>();
    r.abs_err = j.at("abs_err").get<double>();
    r.rel_err = j.at("rel_err").get<double>();
    r.quad_converged = j.at("quad_converged").get<bool>();
    r.pass = j.at("pass").get<bool>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
    return r;
}

json suite_to_json(const RunConfig& cfg, const SuiteResult& res) {
    json jcfg{{"domain", cfg.domain_id},
              {"collar_inner", cfg.collar_inner},
              {"collar_outer", cfg.collar_outer},
              {"k", cfg.ks},
              {"g", cfg.g_ids},
              {"eta", cfg.eta_ids},
              {"variant", cfg.variants},
              {"tol_rel", cfg.tol_rel},
              {"tol_rel_singular", cfg.tol_rel_singular},
              {"tol_abs", cfg.tol_abs},
              {"quad_rel_tol", cfg.quad_rel_tol},
              {"quad_rel_tol_singular", cfg.quad_rel_tol_singular},
              {"quad_abs_tol", cfg.quad_abs_tol},
              {"max_subdivisions", cfg.max_subdivisions},
              {"base_rule", cfg.base_rule},
              {"seed", cfg.seed}};
    json cells = json::array();
    for (const auto& c : res.cells) cells.push_back(report_to_json(c));
    return json{{"schema_version", "1"},
                {"config", jcfg},
                {"results", cells},
                {"summary", json{{"total", res.cells.size()},
                                 {"passed", res.passed},
                                 {"failed", res.failed},
                                 {"all_pass", res.all_pass}}}};
}

std::string suite_to_csv(const SuiteResult& res) {
    std::ostringstream out;
    out << "domain,k,g,eta,variant,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,pass\n";
    for (const auto& c : res.cells) {
        out << c.domain_id << ',' << c.k << ',' << c.g_id << ',' << c.eta_id << ',' << c.variant
            << ',' << format_double(c.lhs.real()) << ',' << format_double(c.lhs.imag()) << ','
            << format_double(c.rhs.real()) << ',' << format_double(c.rhs.imag()) << ','
            << format_double(c.abs_err) << ',' << format_double(c.rel_err) << ','
            << (c.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

json smoothing_to_json(const SmoothingReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back(json{{"j", r.j},
                            {"projected_norm", r.projected_norm},
                            {"weighted_norm", r.weighted_norm},
                            {"ratio", r.ratio}});
    return json{{"g", rep.g_id},
                {"k", rep.k},
                {"k1", rep.k1},
                {"k2", rep.k2},
                {"j_max", rep.j_max},
                {"rows", rows},
                {"max_ratio_low", rep.max_ratio_low},
                {"max_ratio_high", rep.max_ratio_high},
                {"bounded", rep.bounded}};
}

json profile_to_json(const VanishingProfile& prof) {
    json rays = json::array();
    for (const auto& ray : prof.rays) {
        json levels = json::array();
        for (const auto& level : ray.magnitudes) levels.push_back(level);
        json slopes = json::array();
        for (double s : ray.slopes) {
            if (std::isnan(s)) slopes.push_back(nullptr);
            else slopes.push_back(s);
        }
        rays.push_back(json{{"direction", std::vector<double>(ray.direction.begin(),
                                                              ray.direction.end())},
                            {"scales", ray.scales},
                            {"magnitudes", levels},
                            {"slopes", slopes},
                            {"degenerate", ray.degenerate}});
    }
    return json{{"k", prof.k}, {"rays", rays}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit_reports(const RunConfig& cfg, const SuiteResult& res, const std::string& dir) {
    std::filesystem::create_directories(dir);
    json j = suite_to_json(cfg, res);
    write_text_file((std::filesystem::path(dir) / "suite.json").string(), j.dump(2) + "\n");
    write_text_file((std::filesystem::path(dir) / "suite.csv").string(), suite_to_csv(res));
}

std::string strip_runtimes(const std::string& json_text) {
    json j = json::parse(json_text);
    std::function<void(json&)> scrub = [&](json& node) {
        if (node.is_object()) {
            node.erase("runtime_seconds");
            for (auto& [key, value] : node.items()) scrub(value);
        } else if (node.is_array()) {
            for (auto& value : node) scrub(value);
        }
    };
    scrub(j);
    return j.dump(2) + "\n";
}

}  // namespace hw
