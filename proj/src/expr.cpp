#include "holoweight/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <mutex>
#include <unordered_map>

namespace hw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_zero(const Complex& v) { return v.real() == 0.0 && v.imag() == 0.0; }

inline double canon(double v) { return v == 0.0 ? 0.0 : v; }
inline Complex canon(Complex v) { return Complex(canon(v.real()), canon(v.imag())); }

inline std::uint64_t bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

struct Key {
    ExprKind kind;
    std::uint64_t a = 0, b = 0;
    std::int64_t c = 0;
    std::vector<std::uint32_t> kids;

    bool operator==(const Key& o) const {
        return kind == o.kind && a == o.a && b == o.b && c == o.c && kids == o.kids;
    }
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(static_cast<std::uint64_t>(k.kind));
        mix(k.a);
        mix(k.b);
        mix(static_cast<std::uint64_t>(k.c));
        for (auto id : k.kids) mix(id);
        return static_cast<std::size_t>(h);
    }
};

class Pool {
public:
    static Pool& get() {
        static Pool p;
        return p;
    }

    std::recursive_mutex mu;
    std::deque<ExprNode> arena;
    std::unordered_map<Key, ExprRef, KeyHash> table;
    std::unordered_map<std::uint64_t, ExprRef> dcache;   // (id << 8) | axis
    std::unordered_map<std::uint32_t, ExprRef> scache;   // id -> simplified

    ExprRef intern(ExprKind kind, Complex scalar, int exponent, int axis, double geps,
                   std::vector<ExprRef> kids) {
        std::lock_guard<std::recursive_mutex> lock(mu);
        scalar = canon(scalar);
        Key key;
        key.kind = kind;
        switch (kind) {
            case ExprKind::Const:
            case ExprKind::Scale:
                key.a = bits(scalar.real());
                key.b = bits(scalar.imag());
                break;
            case ExprKind::Coord:
                key.c = axis;
                break;
            case ExprKind::Power:
                key.c = exponent;
                break;
            case ExprKind::CollarQuotient:
                key.a = bits(geps);
                break;
            default:
                break;
        }
        key.kids.reserve(kids.size());
        for (auto* k : kids) key.kids.push_back(k->id);

        auto it = table.find(key);
        if (it != table.end()) return it->second;

        arena.emplace_back();
        ExprNode& n = arena.back();
        n.kind = kind;
        n.scalar = scalar;
        n.exponent = exponent;
        n.axis = axis;
        n.guard_eps = geps;
        n.kids = std::move(kids);
        n.id = static_cast<std::uint32_t>(arena.size() - 1);

        int ma = (kind == ExprKind::Coord) ? axis : 0;
        bool real = true;
        switch (kind) {
            case ExprKind::Const:
                real = scalar.imag() == 0.0;
                break;
            case ExprKind::Scale:
                real = scalar.imag() == 0.0 && n.kids[0]->real;
                break;
            case ExprKind::Coord:
                break;
            case ExprKind::CollarQuotient:
                real = n.kids[0]->real;
                break;
            default:
                for (auto* k : n.kids) real = real && k->real;
                break;
        }
        for (auto* k : n.kids) ma = std::max(ma, static_cast<int>(k->max_axis));
        n.real = real;
        n.max_axis = static_cast<std::uint8_t>(ma);

        table.emplace(std::move(key), &n);
        return &n;
    }
};

inline ExprRef node_of(Field f) { return f.node(); }

Field make_const(Complex v) {
    return Field(Pool::get().intern(ExprKind::Const, v, 0, 0, 0.0, {}));
}

bool is_const(ExprRef n) { return n->kind == ExprKind::Const; }
bool is_const(ExprRef n, double v) {
    return n->kind == ExprKind::Const && n->scalar == Complex(v, 0.0);
}

// Light, exactly value-preserving folds used while assembling derivatives.
Field smart_add(std::vector<Field> terms) {
    std::vector<Field> out;
    for (auto& t : terms) {
        if (is_const(t.node(), 0.0)) continue;
        out.push_back(t);
    }
    if (out.empty()) return make_const(Complex(0.0, 0.0));
    if (out.size() == 1) return out[0];
    return Field::sum(out);
}

Field smart_mul(std::vector<Field> factors) {
    std::vector<Field> out;
    for (auto& f : factors) {
        if (is_const(f.node(), 0.0)) return make_const(Complex(0.0, 0.0));
        if (is_const(f.node(), 1.0)) continue;
        out.push_back(f);
    }
    if (out.empty()) return make_const(Complex(1.0, 0.0));
    if (out.size() == 1) return out[0];
    return Field::product(out);
}

Field smart_scale(Complex c, Field f) {
    c = canon(c);
    if (is_zero(c)) return make_const(Complex(0.0, 0.0));
    if (c == Complex(1.0, 0.0)) return f;
    if (is_const(f.node())) return make_const(c * f.node()->scalar);
    if (f.kind() == ExprKind::Scale)
        return smart_scale(c * f.node()->scalar, Field(f.node()->kids[0]));
    return Field::scale(c, f);
}

Field smart_pow(Field f, int m) {
    if (m == 1) return f;
    return Field::power(f, m);
}

Complex cpow_int(Complex v, int m) {
    Complex r = v;
    for (int i = 1; i < m; ++i) r *= v;
    return r;
}

ExprRef derivative(ExprRef n, int axis);

Field dfield(ExprRef n, int axis) { return Field(derivative(n, axis)); }

ExprRef derivative(ExprRef n, int axis) {
    Pool& pool = Pool::get();
    std::lock_guard<std::recursive_mutex> lock(pool.mu);
    const std::uint64_t ck = (static_cast<std::uint64_t>(n->id) << 8) | static_cast<std::uint32_t>(axis);
    auto it = pool.dcache.find(ck);
    if (it != pool.dcache.end()) return it->second;

    Field self(n);
    Field result;
    switch (n->kind) {
        case ExprKind::Const:
            result = make_const(Complex(0.0, 0.0));
            break;
        case ExprKind::Coord:
            result = make_const(Complex(n->axis == axis ? 1.0 : 0.0, 0.0));
            break;
        case ExprKind::Sum: {
            std::vector<Field> terms;
            for (auto* k : n->kids) terms.push_back(dfield(k, axis));
            result = smart_add(std::move(terms));
            break;
        }
        case ExprKind::Product: {
            std::vector<Field> terms;
            for (std::size_t i = 0; i < n->kids.size(); ++i) {
                Field dk = dfield(n->kids[i], axis);
                if (is_const(dk.node(), 0.0)) continue;
                std::vector<Field> fac;
                for (std::size_t j = 0; j < n->kids.size(); ++j)
                    fac.push_back(j == i ? dk : Field(n->kids[j]));
                terms.push_back(smart_mul(std::move(fac)));
            }
            result = smart_add(std::move(terms));
            break;
        }
        case ExprKind::Scale:
            result = smart_scale(n->scalar, dfield(n->kids[0], axis));
            break;
        case ExprKind::Power: {
            Field dk = dfield(n->kids[0], axis);
            if (n->exponent == 1) {
                result = dk;
            } else {
                Field base = smart_pow(Field(n->kids[0]), n->exponent - 1);
                result = smart_scale(Complex(n->exponent, 0.0), smart_mul({base, dk}));
            }
            break;
        }
        case ExprKind::Recip: {
            Field sq = Field::recip(Field::power(Field(n->kids[0]), 2));
            result = smart_scale(Complex(-1.0, 0.0), smart_mul({sq, dfield(n->kids[0], axis)}));
            break;
        }
        case ExprKind::Exp:
            result = smart_mul({self, dfield(n->kids[0], axis)});
            break;
        case ExprKind::Sqrt:
            result = smart_scale(Complex(0.5, 0.0),
                                 smart_mul({Field::recip(self), dfield(n->kids[0], axis)}));
            break;
        case ExprKind::SmoothStepE:
            // e'(t) = e(t) / t^2; the e(t) factor is an exact 0 on the flat side,
            // which masks the reciprocal at t = 0.
            result = smart_mul({self, Field::recip(Field::power(Field(n->kids[0]), 2)),
                                dfield(n->kids[0], axis)});
            break;
        case ExprKind::CollarQuotient: {
            Field f(n->kids[0]), delta(n->kids[1]);
            Field t1 = Field::collar_quotient(dfield(n->kids[0], axis), delta, n->guard_eps);
            Field dd = dfield(n->kids[1], axis);
            Field t2 = Field::collar_quotient(smart_mul({self, dd}), delta, n->guard_eps);
            result = smart_add({t1, smart_scale(Complex(-1.0, 0.0), t2)});
            break;
        }
    }
    pool.dcache.emplace(ck, result.node());
    return result.node();
}

ExprRef simplify_node(ExprRef n);

// Flatten a simplified factor into (coefficient, factor list).
void flatten_factor(ExprRef n, Complex& coeff, std::vector<ExprRef>& out) {
    switch (n->kind) {
        case ExprKind::Const:
            coeff *= n->scalar;
            break;
        case ExprKind::Scale:
            coeff *= n->scalar;
            flatten_factor(n->kids[0], coeff, out);
            break;
        case ExprKind::Product:
            for (auto* k : n->kids) flatten_factor(k, coeff, out);
            break;
        default:
            out.push_back(n);
            break;
    }
}

ExprRef simplify_node(ExprRef n) {
    Pool& pool = Pool::get();
    std::lock_guard<std::recursive_mutex> lock(pool.mu);
    auto it = pool.scache.find(n->id);
    if (it != pool.scache.end()) return it->second;

    Field result;
    switch (n->kind) {
        case ExprKind::Const:
        case ExprKind::Coord:
            result = Field(n);
            break;
        case ExprKind::Sum: {
            Complex total(0.0, 0.0);
            std::vector<Field> rest;
            for (auto* k : n->kids) {
                ExprRef s = simplify_node(k);
                if (s->kind == ExprKind::Sum) {
                    for (auto* kk : s->kids) {
                        if (is_const(kk))
                            total += kk->scalar;
                        else
                            rest.push_back(Field(kk));
                    }
                } else if (is_const(s)) {
                    total += s->scalar;
                } else {
                    rest.push_back(Field(s));
                }
            }
            total = canon(total);
            if (rest.empty()) {
                result = make_const(total);
            } else if (is_zero(total)) {
                result = rest.size() == 1 ? rest[0] : Field::sum(rest);
            } else {
                rest.push_back(make_const(total));
                result = Field::sum(rest);
            }
            break;
        }
        case ExprKind::Product: {
            Complex coeff(1.0, 0.0);
            std::vector<ExprRef> flat;
            bool zero = false;
            for (auto* k : n->kids) {
                ExprRef s = simplify_node(k);
                if (is_const(s, 0.0) || (is_const(s) && is_zero(s->scalar))) {
                    zero = true;
                    break;
                }
                flatten_factor(s, coeff, flat);
            }
            coeff = canon(coeff);
            if (zero || is_zero(coeff)) {
                result = make_const(Complex(0.0, 0.0));
            } else if (flat.empty()) {
                result = make_const(coeff);
            } else {
                std::vector<Field> kids;
                kids.reserve(flat.size());
                for (auto* f : flat) kids.push_back(Field(f));
                Field core = kids.size() == 1 ? kids[0] : Field::product(kids);
                result = (coeff == Complex(1.0, 0.0)) ? core : Field::scale(coeff, core);
            }
            break;
        }
        case ExprKind::Scale: {
            if (is_zero(n->scalar)) {
                result = make_const(Complex(0.0, 0.0));
                break;
            }
            ExprRef s = simplify_node(n->kids[0]);
            result = smart_scale(n->scalar, Field(s));
            break;
        }
        case ExprKind::Power: {
            ExprRef s = simplify_node(n->kids[0]);
            if (n->exponent == 1) {
                result = Field(s);
            } else if (is_const(s)) {
                result = make_const(cpow_int(s->scalar, n->exponent));
            } else if (s->kind == ExprKind::Power) {
                result = Field::power(Field(s->kids[0]), n->exponent * s->exponent);
            } else if (s->kind == ExprKind::Scale) {
                result = smart_scale(cpow_int(s->scalar, n->exponent),
                                     smart_pow(Field(s->kids[0]), n->exponent));
            } else {
                result = Field::power(Field(s), n->exponent);
            }
            break;
        }
        case ExprKind::Recip: {
            ExprRef s = simplify_node(n->kids[0]);
            if (is_const(s) && !is_zero(s->scalar)) {
                result = make_const(Complex(1.0, 0.0) / s->scalar);
            } else if (s->kind == ExprKind::Recip) {
                result = Field(s->kids[0]);
            } else if (s->kind == ExprKind::Scale && !is_zero(s->scalar)) {
                result = smart_scale(Complex(1.0, 0.0) / s->scalar, Field::recip(Field(s->kids[0])));
            } else {
                result = Field::recip(Field(s));
            }
            break;
        }
        case ExprKind::Exp: {
            ExprRef s = simplify_node(n->kids[0]);
            result = is_const(s) ? make_const(std::exp(s->scalar)) : Field::exp(Field(s));
            break;
        }
        case ExprKind::Sqrt: {
            ExprRef s = simplify_node(n->kids[0]);
            if (is_const(s) && s->scalar.imag() == 0.0 && s->scalar.real() >= 0.0)
                result = make_const(Complex(std::sqrt(s->scalar.real()), 0.0));
            else
                result = Field::sqrt(Field(s));
            break;
        }
        case ExprKind::SmoothStepE: {
            ExprRef s = simplify_node(n->kids[0]);
            if (is_const(s)) {
                double t = s->scalar.real();
                result = make_const(Complex(t > 0.0 ? std::exp(-1.0 / t) : 0.0, 0.0));
            } else {
                result = Field::smoothstep_e(Field(s));
            }
            break;
        }
        case ExprKind::CollarQuotient: {
            ExprRef f = simplify_node(n->kids[0]);
            ExprRef d = simplify_node(n->kids[1]);
            if (is_const(f, 0.0))
                result = make_const(Complex(0.0, 0.0));
            else
                result = Field::collar_quotient(Field(f), Field(d), n->guard_eps);
            break;
        }
    }
    pool.scache.emplace(n->id, result.node());
    return result.node();
}

}  // namespace

Field Field::constant(double v) { return make_const(Complex(v, 0.0)); }
Field Field::constant(Complex v) { return make_const(v); }

Field Field::coordinate(int axis) {
    if (axis < 1 || axis > 200) throw std::invalid_argument("coordinate axis must be in 1..200");
    return Field(Pool::get().intern(ExprKind::Coord, Complex(), 0, axis, 0.0, {}));
}

Field Field::sum(const std::vector<Field>& terms) {
    if (terms.empty()) return make_const(Complex(0.0, 0.0));
    if (terms.size() == 1) return terms[0];
    std::vector<ExprRef> kids;
    kids.reserve(terms.size());
    for (auto& t : terms) kids.push_back(t.node());
    return Field(Pool::get().intern(ExprKind::Sum, Complex(), 0, 0, 0.0, std::move(kids)));
}

Field Field::product(const std::vector<Field>& factors) {
    if (factors.empty()) return make_const(Complex(1.0, 0.0));
    if (factors.size() == 1) return factors[0];
    std::vector<ExprRef> kids;
    kids.reserve(factors.size());
    for (auto& f : factors) kids.push_back(f.node());
    return Field(Pool::get().intern(ExprKind::Product, Complex(), 0, 0, 0.0, std::move(kids)));
}

Field Field::scale(Complex c, Field f) {
    return Field(Pool::get().intern(ExprKind::Scale, c, 0, 0, 0.0, {f.node()}));
}

Field Field::power(Field f, int exponent) {
    if (exponent < 1) throw std::invalid_argument("power exponent must be >= 1");
    return Field(Pool::get().intern(ExprKind::Power, Complex(), exponent, 0, 0.0, {f.node()}));
}

Field Field::recip(Field f) {
    return Field(Pool::get().intern(ExprKind::Recip, Complex(), 0, 0, 0.0, {f.node()}));
}

Field Field::exp(Field f) {
    return Field(Pool::get().intern(ExprKind::Exp, Complex(), 0, 0, 0.0, {f.node()}));
}

Field Field::sqrt(Field f) {
    return Field(Pool::get().intern(ExprKind::Sqrt, Complex(), 0, 0, 0.0, {f.node()}));
}

Field Field::smoothstep_e(Field f) {
    if (!f.is_real())
        throw std::invalid_argument("smoothstep_e requires a real-valued argument");
    return Field(Pool::get().intern(ExprKind::SmoothStepE, Complex(), 0, 0, 0.0, {f.node()}));
}

Field Field::collar_quotient(Field f, Field delta, double eps1) {
    if (!(eps1 > 0.0)) throw std::invalid_argument("collar_quotient threshold must be positive");
    if (!delta.is_real())
        throw std::invalid_argument("collar_quotient denominator must be real-valued");
    return Field(
        Pool::get().intern(ExprKind::CollarQuotient, Complex(), 0, 0, eps1, {f.node(), delta.node()}));
}

Field Field::partial(int axis) const {
    if (axis < 1) throw std::invalid_argument("partial: axis must be >= 1");
    return Field(derivative(node_, axis));
}

Field Field::simplified() const { return Field(simplify_node(node_)); }

Field laplacian(Field f, int ambient_dim) {
    if (ambient_dim < 1) throw std::invalid_argument("laplacian: ambient_dim must be >= 1");
    std::vector<Field> terms;
    for (int j = 1; j <= ambient_dim; ++j) terms.push_back(f.partial(j).partial(j));
    return smart_add(std::move(terms));
}

namespace {

Complex eval_node(ExprRef n, Point pt, std::unordered_map<ExprRef, Complex>& memo) {
    switch (n->kind) {
        case ExprKind::Const:
            return n->scalar;
        case ExprKind::Coord:
            return Complex(pt[static_cast<std::size_t>(n->axis - 1)], 0.0);
        default:
            break;
    }
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;

    Complex out;
    switch (n->kind) {
        case ExprKind::Sum: {
            Complex acc(0.0, 0.0);
            for (auto* k : n->kids) acc += eval_node(k, pt, memo);
            out = acc;
            break;
        }
        case ExprKind::Product: {
            // Exact-zero factors short-circuit the whole product; this is what
            // makes guarded singular factors harmless.
            std::vector<Complex> vals;
            vals.reserve(n->kids.size());
            bool zero = false;
            for (auto* k : n->kids) {
                Complex v = eval_node(k, pt, memo);
                if (is_zero(v)) {
                    zero = true;
                    break;
                }
                vals.push_back(v);
            }
            if (zero) {
                out = Complex(0.0, 0.0);
            } else {
                Complex acc = vals[0];
                for (std::size_t i = 1; i < vals.size(); ++i) acc *= vals[i];
                out = acc;
            }
            break;
        }
        case ExprKind::Scale: {
            if (is_zero(n->scalar)) {
                out = Complex(0.0, 0.0);
            } else {
                Complex v = eval_node(n->kids[0], pt, memo);
                out = is_zero(v) ? Complex(0.0, 0.0) : n->scalar * v;
            }
            break;
        }
        case ExprKind::Power: {
            Complex v = eval_node(n->kids[0], pt, memo);
            out = is_zero(v) ? Complex(0.0, 0.0) : cpow_int(v, n->exponent);
            break;
        }
        case ExprKind::Recip: {
            Complex v = eval_node(n->kids[0], pt, memo);
            if (is_zero(v))
                out = Complex(kInf, kInf);
            else if (n->real)
                out = Complex(1.0 / v.real(), 0.0);
            else
                out = Complex(1.0, 0.0) / v;
            break;
        }
        case ExprKind::Exp: {
            Complex v = eval_node(n->kids[0], pt, memo);
            out = n->real ? Complex(std::exp(v.real()), 0.0) : std::exp(v);
            break;
        }
        case ExprKind::Sqrt: {
            Complex v = eval_node(n->kids[0], pt, memo);
            out = n->real ? Complex(std::sqrt(v.real()), 0.0) : std::sqrt(v);
            break;
        }
        case ExprKind::SmoothStepE: {
            double t = eval_node(n->kids[0], pt, memo).real();
            out = Complex(t > 0.0 ? std::exp(-1.0 / t) : 0.0, 0.0);
            break;
        }
        case ExprKind::CollarQuotient: {
            double d = eval_node(n->kids[1], pt, memo).real();
            if (d < n->guard_eps * (1.0 - 1e-9)) {
                out = Complex(0.0, 0.0);
            } else {
                Complex f = eval_node(n->kids[0], pt, memo);
                out = Complex(f.real() / d, f.imag() / d);
            }
            break;
        }
        default:
            out = Complex(0.0, 0.0);
            break;
    }
    memo.emplace(n, out);
    return out;
}

}  // namespace

Complex Field::eval(Point point) const {
    if (static_cast<int>(point.size()) < max_axis())
        throw std::invalid_argument("eval: point has fewer coordinates than the expression uses");
    std::unordered_map<ExprRef, Complex> memo;
    memo.reserve(64);
    Complex v = eval_node(node_, point, memo);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvalDomainError("expression evaluated to a non-finite value (unguarded singularity)");
    return v;
}

Complex evaluate(const Field& f, const EvalContext& ctx) { return f.eval(ctx.point); }

std::size_t Field::dag_size() const {
    std::vector<ExprRef> stack{node_};
    std::unordered_map<ExprRef, bool> seen;
    while (!stack.empty()) {
        ExprRef n = stack.back();
        stack.pop_back();
        if (seen.count(n)) continue;
        seen[n] = true;
        for (auto* k : n->kids) stack.push_back(k);
    }
    return seen.size();
}

namespace {
double tree_size_rec(ExprRef n, std::unordered_map<ExprRef, double>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    double s = 1.0;
    for (auto* k : n->kids) s += tree_size_rec(k, memo);
    memo.emplace(n, s);
    return s;
}
}  // namespace

double Field::tree_size() const {
    std::unordered_map<ExprRef, double> memo;
    return tree_size_rec(node_, memo);
}

namespace {

void fmt_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void dump_rec(ExprRef n, std::string& out) {
    switch (n->kind) {
        case ExprKind::Const:
            out += "(const ";
            fmt_double(out, n->scalar.real());
            out += ' ';
            fmt_double(out, n->scalar.imag());
            out += ')';
            return;
        case ExprKind::Coord:
            out += "(coord ";
            out += std::to_string(n->axis);
            out += ')';
            return;
        case ExprKind::Sum:
            out += "(sum";
            break;
        case ExprKind::Product:
            out += "(prod";
            break;
        case ExprKind::Scale:
            out += "(scale ";
            fmt_double(out, n->scalar.real());
            out += ' ';
            fmt_double(out, n->scalar.imag());
            break;
        case ExprKind::Power:
            out += "(pow ";
            out += std::to_string(n->exponent);
            break;
        case ExprKind::Recip:
            out += "(recip";
            break;
        case ExprKind::Exp:
            out += "(exp";
            break;
        case ExprKind::Sqrt:
            out += "(sqrt";
            break;
        case ExprKind::SmoothStepE:
            out += "(estep";
            break;
        case ExprKind::CollarQuotient:
            out += "(collarq ";
            fmt_double(out, n->guard_eps);
            break;
    }
    for (auto* k : n->kids) {
        out += ' ';
        dump_rec(k, out);
    }
    out += ')';
}

}  // namespace

std::string Field::dump() const {
    std::string out;
    dump_rec(node_, out);
    return out;
}

// ---------------------------------------------------------------------------
// Compiled evaluator
// ---------------------------------------------------------------------------

namespace {
// Packed operand reference: (slot << 1) | is_real.
inline std::uint32_t pack(std::uint32_t slot, bool real) {
    return (slot << 1) | (real ? 1u : 0u);
}
}  // namespace

struct CompiledField::Program {
    struct Instr {
        ExprKind kind;
        bool out_real;
        std::uint32_t out;
        std::uint32_t a = 0;            // unary/binary operand refs
        std::uint32_t b = 0;
        std::uint32_t ops_begin = 0;    // Sum/Product operand range
        std::uint32_t ops_count = 0;
        Complex scalar;
        int exponent = 0;
        int axis = 0;
        double geps = 0.0;
    };
    std::vector<Instr> code;
    std::vector<std::uint32_t> operands;
    std::uint32_t n_real = 0, n_cplx = 0;
    std::uint32_t root = 0;
    int max_axis = 0;
};

CompiledField::CompiledField(const Field& f) {
    auto prog = std::make_shared<Program>();
    prog->max_axis = f.max_axis();

    std::unordered_map<ExprRef, std::uint32_t> slot_of;  // packed refs
    std::vector<std::pair<ExprRef, bool>> stack;         // (node, expanded)
    stack.emplace_back(f.node(), false);
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (slot_of.count(n)) continue;
        if (!expanded) {
            stack.emplace_back(n, true);
            for (auto* k : n->kids) {
                if (!slot_of.count(k)) stack.emplace_back(k, false);
            }
            continue;
        }
        Program::Instr in;
        in.kind = n->kind;
        in.out_real = n->real;
        in.scalar = n->scalar;
        in.exponent = n->exponent;
        in.axis = n->axis;
        in.geps = n->guard_eps;
        in.out = in.out_real ? prog->n_real++ : prog->n_cplx++;
        switch (n->kind) {
            case ExprKind::Sum:
            case ExprKind::Product:
                in.ops_begin = static_cast<std::uint32_t>(prog->operands.size());
                in.ops_count = static_cast<std::uint32_t>(n->kids.size());
                for (auto* k : n->kids) prog->operands.push_back(slot_of.at(k));
                break;
            case ExprKind::CollarQuotient:
                in.a = slot_of.at(n->kids[0]);
                in.b = slot_of.at(n->kids[1]);
                break;
            case ExprKind::Const:
            case ExprKind::Coord:
                break;
            default:
                in.a = slot_of.at(n->kids[0]);
                break;
        }
        slot_of[n] = pack(in.out, in.out_real);
        prog->code.push_back(in);
    }
    prog->root = slot_of.at(f.node());
    prog_ = std::move(prog);
}

std::size_t CompiledField::instruction_count() const { return prog_ ? prog_->code.size() : 0; }

Complex CompiledField::eval(Point point) const {
    const Program& p = *prog_;
    if (static_cast<int>(point.size()) < p.max_axis)
        throw std::invalid_argument("eval: point has fewer coordinates than the expression uses");

    thread_local std::vector<double> rt;
    thread_local std::vector<Complex> ct;
    if (rt.size() < p.n_real) rt.resize(p.n_real);
    if (ct.size() < p.n_cplx) ct.resize(p.n_cplx);

    auto fetch = [&](std::uint32_t ref) -> Complex {
        return (ref & 1u) ? Complex(rt[ref >> 1], 0.0) : ct[ref >> 1];
    };
    auto fetch_real = [&](std::uint32_t ref) -> double { return rt[ref >> 1]; };

    for (const auto& in : p.code) {
        switch (in.kind) {
            case ExprKind::Const:
                if (in.out_real)
                    rt[in.out] = in.scalar.real();
                else
                    ct[in.out] = in.scalar;
                break;
            case ExprKind::Coord:
                rt[in.out] = point[static_cast<std::size_t>(in.axis - 1)];
                break;
            case ExprKind::Sum: {
                const std::uint32_t* ops = p.operands.data() + in.ops_begin;
                if (in.out_real) {
                    double acc = 0.0;
                    for (std::uint32_t i = 0; i < in.ops_count; ++i) acc += fetch_real(ops[i]);
                    rt[in.out] = acc;
                } else {
                    Complex acc(0.0, 0.0);
                    for (std::uint32_t i = 0; i < in.ops_count; ++i) {
                        std::uint32_t r = ops[i];
                        if (r & 1u)
                            acc += rt[r >> 1];
                        else
                            acc += ct[r >> 1];
                    }
                    ct[in.out] = acc;
                }
                break;
            }
            case ExprKind::Product: {
                const std::uint32_t* ops = p.operands.data() + in.ops_begin;
                bool zero = false;
                if (in.out_real) {
                    for (std::uint32_t i = 0; i < in.ops_count && !zero; ++i)
                        zero = fetch_real(ops[i]) == 0.0;
                    if (zero) {
                        rt[in.out] = 0.0;
                    } else {
                        double acc = fetch_real(ops[0]);
                        for (std::uint32_t i = 1; i < in.ops_count; ++i) acc *= fetch_real(ops[i]);
                        rt[in.out] = acc;
                    }
                } else {
                    for (std::uint32_t i = 0; i < in.ops_count && !zero; ++i) {
                        std::uint32_t r = ops[i];
                        zero = (r & 1u) ? rt[r >> 1] == 0.0 : is_zero(ct[r >> 1]);
                    }
                    if (zero) {
                        ct[in.out] = Complex(0.0, 0.0);
                    } else {
                        Complex acc = fetch(ops[0]);
                        for (std::uint32_t i = 1; i < in.ops_count; ++i) {
                            std::uint32_t r = ops[i];
                            if (r & 1u)
                                acc *= rt[r >> 1];
                            else
                                acc *= ct[r >> 1];
                        }
                        ct[in.out] = acc;
                    }
                }
                break;
            }
            case ExprKind::Scale: {
                if (in.out_real) {
                    double v = fetch_real(in.a);
                    rt[in.out] = (in.scalar.real() == 0.0 || v == 0.0) ? 0.0 : in.scalar.real() * v;
                } else {
                    Complex v = fetch(in.a);
                    ct[in.out] = (is_zero(in.scalar) || is_zero(v)) ? Complex(0.0, 0.0) : in.scalar * v;
                }
                break;
            }
            case ExprKind::Power: {
                if (in.out_real) {
                    double v = fetch_real(in.a);
                    if (v == 0.0) {
                        rt[in.out] = 0.0;
                    } else {
                        double acc = v;
                        for (int i = 1; i < in.exponent; ++i) acc *= v;
                        rt[in.out] = acc;
                    }
                } else {
                    Complex v = fetch(in.a);
                    ct[in.out] = is_zero(v) ? Complex(0.0, 0.0) : cpow_int(v, in.exponent);
                }
                break;
            }
            case ExprKind::Recip: {
                if (in.out_real) {
                    double v = fetch_real(in.a);
                    rt[in.out] = v == 0.0 ? kInf : 1.0 / v;
                } else {
                    Complex v = fetch(in.a);
                    ct[in.out] = is_zero(v) ? Complex(kInf, kInf) : Complex(1.0, 0.0) / v;
                }
                break;
            }
            case ExprKind::Exp:
                if (in.out_real)
                    rt[in.out] = std::exp(fetch_real(in.a));
                else
                    ct[in.out] = std::exp(fetch(in.a));
                break;
            case ExprKind::Sqrt:
                if (in.out_real)
                    rt[in.out] = std::sqrt(fetch_real(in.a));
                else
                    ct[in.out] = std::sqrt(fetch(in.a));
                break;
            case ExprKind::SmoothStepE: {
                double t = fetch_real(in.a);
                rt[in.out] = t > 0.0 ? std::exp(-1.0 / t) : 0.0;
                break;
            }
            case ExprKind::CollarQuotient: {
                double d = fetch_real(in.b);
                bool below = d < in.geps * (1.0 - 1e-9);
                if (in.out_real) {
                    rt[in.out] = below ? 0.0 : fetch_real(in.a) / d;
                } else {
                    if (below) {
                        ct[in.out] = Complex(0.0, 0.0);
                    } else {
                        Complex f = fetch(in.a);
                        ct[in.out] = Complex(f.real() / d, f.imag() / d);
                    }
                }
                break;
            }
        }
    }
    Complex v = (p.root & 1u) ? Complex(rt[p.root >> 1], 0.0) : ct[p.root >> 1];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvalDomainError("expression evaluated to a non-finite value (unguarded singularity)");
    return v;
}

std::size_t intern_pool_size() {
    Pool& pool = Pool::get();
    std::lock_guard<std::recursive_mutex> lock(pool.mu);
    return pool.arena.size();
}

}  // namespace hw
