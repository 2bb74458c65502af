#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hw {

using Complex = std::complex<double>;
using Point = std::span<const double>;

struct DomainModel;

/// Raised when evaluating an expression yields a non-finite result, i.e. a
/// reciprocal or square-root singularity that is not masked by a vanishing
/// factor. Well-formed weight expressions never trigger this on the closed
/// model domains; hitting it indicates an assembly bug.
struct EvalDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExprKind : std::uint8_t {
    Const,
    Coord,
    Sum,
    Product,
    Scale,
    Power,
    Recip,
    Exp,
    Sqrt,
    SmoothStepE,
    CollarQuotient,
};

class ExprNode;
using ExprRef = const ExprNode*;

/// One interned, immutable node of the expression DAG. Structurally equal
/// nodes are shared: building the same subtree twice yields the same pointer.
class ExprNode {
public:
    ExprKind kind;
    bool real;              // value is real for real coordinates
    std::uint8_t max_axis;  // highest coordinate axis referenced (0 if none)
    std::uint32_t id;       // interning sequence number (deterministic per build order)
    Complex scalar{0.0, 0.0};  // Const value / Scale factor
    int exponent = 0;          // Power
    int axis = 0;              // Coord (1-based)
    double guard_eps = 0.0;    // CollarQuotient threshold
    std::vector<ExprRef> kids; // CollarQuotient: kids[0] = numerator, kids[1] = delta

    ExprNode() = default;
    ExprNode(const ExprNode&) = delete;
    ExprNode& operator=(const ExprNode&) = delete;
};

/// Value-semantic handle to an interned expression.
///
/// Evaluation semantics worth knowing:
///  * Product, Scale and Power return an exact 0 as soon as any factor is
///    exactly 0, without consuming the other factors. Guard factors (smooth
///    steps in their flat region, CollarQuotient below its threshold) produce
///    exact zeros, so expressions whose singular pieces are multiplied by such
///    guards evaluate cleanly everywhere on the closed domain.
///  * SmoothStepE(t) = exp(-1/t) for t > 0 and exactly 0 otherwise.
///  * CollarQuotient(f, delta) = f/delta, hard 0 when delta < eps*(1-1e-9).
class Field {
public:
    Field() : node_(nullptr) {}
    explicit Field(ExprRef node) : node_(node) {}

    static Field constant(double v);
    static Field constant(Complex v);
    /// Coordinate x_j, 1-based axis index.
    static Field coordinate(int axis);
    static Field sum(const std::vector<Field>& terms);
    static Field product(const std::vector<Field>& factors);
    static Field scale(Complex c, Field f);
    static Field power(Field f, int exponent);
    static Field recip(Field f);
    static Field exp(Field f);
    static Field sqrt(Field f);
    static Field smoothstep_e(Field f);
    /// f / delta with a hard zero below the collar threshold eps1.
    /// Contract: supp(f) must lie in {delta >= eps1}; delta must be real-valued.
    static Field collar_quotient(Field f, Field delta, double eps1);

    bool valid() const { return node_ != nullptr; }
    ExprRef node() const { return node_; }
    ExprKind kind() const { return node_->kind; }
    std::uint32_t id() const { return node_->id; }
    bool is_real() const { return node_->real; }
    int max_axis() const { return node_->max_axis; }

    /// Structural partial derivative with respect to coordinate axis (1-based).
    Field partial(int axis) const;
    /// Value-preserving rewrite pass: constant folding, 0/1 absorption,
    /// flattening of nested sums/products, scale fusion.
    Field simplified() const;

    /// Tree-walking evaluation. Throws EvalDomainError on a non-finite result.
    Complex eval(Point point) const;

    /// Number of unique DAG nodes reachable from this expression.
    std::size_t dag_size() const;
    /// Size the expression would have as a tree without sharing (saturating).
    double tree_size() const;

    /// Plain-text S-expression dump (stable; used for snapshot tests).
    std::string dump() const;

    friend Field operator+(Field a, Field b) { return sum({a, b}); }
    friend Field operator-(Field a, Field b) { return sum({a, scale(Complex(-1.0, 0.0), b)}); }
    friend Field operator*(Field a, Field b) { return product({a, b}); }
    friend Field operator*(Complex c, Field f) { return scale(c, f); }
    friend Field operator*(double c, Field f) { return scale(Complex(c, 0.0), f); }
    friend Field operator-(Field a) { return scale(Complex(-1.0, 0.0), a); }
    friend bool operator==(Field a, Field b) { return a.node_ == b.node_; }

private:
    ExprRef node_;
};

/// Evaluation context: the point, plus an optional domain reference for
/// callers that carry one around. CollarQuotient nodes are self-contained
/// (they store their own delta and threshold), so `domain` is informational.
struct EvalContext {
    Point point;
    const DomainModel* domain = nullptr;
};

Complex evaluate(const Field& f, const EvalContext& ctx);

/// Sum of second partials over axes 1..ambient_dim.
Field laplacian(Field f, int ambient_dim);

/// Flattened, table-driven evaluator for repeated evaluation of one DAG.
/// Real-valued subgraphs run on a real tape; the rest on a complex tape.
/// Thread-safe: each thread uses its own scratch tapes.
class CompiledField {
public:
    CompiledField() = default;
    explicit CompiledField(const Field& f);

    Complex eval(Point point) const;
    Complex operator()(Point point) const { return eval(point); }

    bool valid() const { return prog_ != nullptr; }
    std::size_t instruction_count() const;

private:
    struct Program;
    std::shared_ptr<const Program> prog_;
};

/// Statistics for the global intern pool (diagnostics only).
std::size_t intern_pool_size();

}  // namespace hw
