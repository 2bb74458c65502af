#include "holoweight/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "holoweight/catalog.hpp"
#include "holoweight/geometry.hpp"
#include "holoweight/weights.hpp"

namespace hw {
namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& tok, int line) {
    if (tok.size() >= 2 && tok.front() == '"') {
        if (tok.back() != '"') fail(line, "unterminated string literal");
        return tok.substr(1, tok.size() - 2);
    }
    return tok;
}

std::vector<std::string> split_list(const std::string& body, int line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quote = false;
    for (char c : body) {
        if (c == '"') in_quote = !in_quote;
        if (c == ',' && !in_quote) {
            std::string t = strip(cur);
            if (t.empty()) fail(line, "empty list element");
            out.push_back(unquote(t, line));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string t = strip(cur);
    if (!t.empty()) out.push_back(unquote(t, line));
    if (in_quote) fail(line, "unterminated string literal");
    return out;
}

double parse_double(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + tok + "'");
    }
}

long long parse_ll(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(line, "expected an integer, got '" + tok + "'");
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.domain_id != "disc" && cfg.domain_id != "ball")
        throw std::invalid_argument("config: unknown domain '" + cfg.domain_id + "'");
    if (!(cfg.tol_rel > 0) || !(cfg.tol_rel_singular > 0) || !(cfg.tol_abs > 0))
        throw std::invalid_argument("config: pass tolerances must be positive");
    if (!(cfg.quad_rel_tol > 0) || !(cfg.quad_rel_tol_singular > 0) || !(cfg.quad_abs_tol > 0))
        throw std::invalid_argument("config: quadrature tolerances must be positive");
    if (cfg.max_subdivisions < 0) throw std::invalid_argument("config: max_subdivisions must be >= 0");
    if (cfg.base_rule < 2 || cfg.base_rule > 64)
        throw std::invalid_argument("config: base_rule out of range 2..64");
    if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    for (int k : cfg.ks)
        if (k < 1 || k > 4) throw std::invalid_argument("config: k must lie in 1..4");

    DomainModel dom = make_domain(cfg.domain_id, cfg.collar_inner, cfg.collar_outer);
    for (const auto& g : cfg.g_ids) make_multiplier(dom, g);
    for (const auto& eta : cfg.eta_ids) {
        HoloTestFunction f = find_eta(dom, eta);
        if (!f.l1_member)
            throw std::invalid_argument("config: test function '" + eta + "' is not integrable");
    }
    for (const auto& v : cfg.variants) parse_variant(v);
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        bool in_quote = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_quote = !in_quote;
            if (s[i] == '#' && !in_quote) {
                s = s.substr(0, i);
                break;
            }
        }
        s = strip(s);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        std::string key = strip(s.substr(0, eq));
        std::string val = strip(s.substr(eq + 1));
        if (key.empty()) fail(line, "missing key");
        if (val.empty()) fail(line, "missing value for '" + key + "'");
        if (!seen.insert(key).second) fail(line, "duplicate key '" + key + "'");

        auto want_list = [&](const std::string& v) -> std::vector<std::string> {
            if (v.size() < 2 || v.front() != '[' || v.back() != ']')
                fail(line, "key '" + key + "' expects a [list]");
            return split_list(v.substr(1, v.size() - 2), line);
        };

        if (key == "domain") {
            cfg.domain_id = unquote(val, line);
        } else if (key == "collar_inner") {
            cfg.collar_inner = parse_double(val, line);
        } else if (key == "collar_outer") {
            cfg.collar_outer = parse_double(val, line);
        } else if (key == "k") {
            cfg.ks.clear();
            for (const auto& t : want_list(val)) cfg.ks.push_back(int(parse_ll(t, line)));
        } else if (key == "g") {
            cfg.g_ids = want_list(val);
        } else if (key == "eta") {
            cfg.eta_ids = want_list(val);
        } else if (key == "variant") {
            cfg.variants = want_list(val);
        } else if (key == "tol_rel") {
            cfg.tol_rel = parse_double(val, line);
        } else if (key == "tol_rel_singular") {
            cfg.tol_rel_singular = parse_double(val, line);
        } else if (key == "tol_abs") {
            cfg.tol_abs = parse_double(val, line);
        } else if (key == "quad_rel_tol") {
            cfg.quad_rel_tol = parse_double(val, line);
        } else if (key == "quad_rel_tol_singular") {
            cfg.quad_rel_tol_singular = parse_double(val, line);
        } else if (key == "quad_abs_tol") {
            cfg.quad_abs_tol = parse_double(val, line);
        } else if (key == "max_subdivisions") {
            cfg.max_subdivisions = int(parse_ll(val, line));
        } else if (key == "base_rule") {
            cfg.base_rule = int(parse_ll(val, line));
        } else if (key == "threads") {
            cfg.threads = int(parse_ll(val, line));
        } else if (key == "seed") {
            cfg.seed = std::uint64_t(parse_ll(val, line));
        } else if (key == "out_dir") {
            cfg.out_dir = unquote(val, line);
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

QuadratureConfig quadrature_settings(const RunConfig& cfg, bool singular_eta) {
    QuadratureConfig q;
    q.rel_tol = singular_eta ? cfg.quad_rel_tol_singular : cfg.quad_rel_tol;
    q.abs_tol = cfg.quad_abs_tol;
    q.max_subdivisions = cfg.max_subdivisions;
    q.base_rule = cfg.base_rule;
    return q;
}

}  // namespace hw
