#pragma once

#include "heatwave/kernels.hpp"
#include "heatwave/mesh.hpp"
#include "heatwave/quadrature.hpp"
#include "heatwave/sparse.hpp"
#include "heatwave/weight.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heatwave {

using Vec2 = Eigen::Vector2d;

// ---------------------------------------------------------------------------
// Reference element

/// Degree-r Lagrange basis on a triangle in barycentric coordinates. Local
/// order: vertices 0,1,2, then (r = 2) midpoints of edges 01, 12, 20.
namespace basis {
int local_size(int r);
void values(int r, const Barycentric& b, std::span<double> out);
/// d phi_a / d lambda_k for every local function a.
void bary_derivatives(int r, const Barycentric& b, std::span<std::array<double, 3>> out);
} // namespace basis

struct CellGeometry {
    double area;
    std::array<Vec2, 3> grad_bary;
};

CellGeometry cell_geometry(const Mesh& m, int c);

// ---------------------------------------------------------------------------
// Finite element space

class FeSpace;
using SpacePtr = std::shared_ptr<const FeSpace>;

/// Continuous degree-r Lagrange space with homogeneous Dirichlet conditions
/// built in: algebra lives on interior dofs only. Dofs are the mesh vertices
/// followed (r = 2) by the edges in EdgeTable order.
class FeSpace {
public:
    FeSpace(MeshPtr mesh, int r);
    FeSpace(const FeSpace&) = delete;
    FeSpace& operator=(const FeSpace&) = delete;

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int degree() const { return r_; }
    [[nodiscard]] int local_size() const { return basis::local_size(r_); }
    [[nodiscard]] int n_dofs() const { return static_cast<int>(dof_points_.size()); }
    [[nodiscard]] int n_interior() const { return static_cast<int>(interior_dofs_.size()); }
    [[nodiscard]] std::span<const int> cell_dofs(int c) const
    {
        return {cell_dofs_.data() + static_cast<std::size_t>(c) * local_size(), static_cast<std::size_t>(local_size())};
    }
    /// Interior index of each local dof of cell c, -1 for boundary dofs.
    [[nodiscard]] std::span<const int> cell_interior(int c) const
    {
        return {cell_interior_.data() + static_cast<std::size_t>(c) * local_size(),
                static_cast<std::size_t>(local_size())};
    }
    [[nodiscard]] const std::vector<Point2>& dof_points() const { return dof_points_; }
    [[nodiscard]] const std::vector<std::uint8_t>& interior_mask() const { return interior_mask_; }
    [[nodiscard]] int interior_index(int dof) const { return interior_index_[dof]; }
    [[nodiscard]] const std::vector<int>& interior_dofs() const { return interior_dofs_; }
    /// Lowest-index cell containing the dof and the dof's barycentric coordinates there.
    [[nodiscard]] const Location& dof_location(int dof) const { return dof_location_[dof]; }
    [[nodiscard]] const CellGeometry& geometry(int c) const { return geometry_[c]; }

    /// Mass and stiffness forms on interior dofs, assembled on first use.
    [[nodiscard]] const SparseSym& mass() const;
    [[nodiscard]] const SparseSym& stiffness() const;

private:
    MeshPtr mesh_;
    int r_;
    std::vector<int> cell_dofs_;
    std::vector<int> cell_interior_;
    std::vector<Point2> dof_points_;
    std::vector<std::uint8_t> interior_mask_;
    std::vector<int> interior_index_;
    std::vector<int> interior_dofs_;
    std::vector<Location> dof_location_;
    std::vector<CellGeometry> geometry_;

    mutable std::once_flag mass_once_, stiffness_once_;
    mutable SparseSym mass_, stiffness_;
};

/// Throws ValidationError unless r is 1 or 2.
SpacePtr build_space(MeshPtr mesh, int r);

// ---------------------------------------------------------------------------
// Functions that can be sampled cell by cell

struct CellPoint {
    int cell;
    Point2 x;
    Barycentric bary;
};

using ScalarFn = std::function<double(const CellPoint&)>;
using GradientFn = std::function<Vec2(const CellPoint&)>;

/// A function known through its values (and optionally its gradient) at
/// points addressed by host cell. Cellwise definitions let discrete fields
/// and cell-supported functionals be evaluated without point location.
struct Evaluable {
    ScalarFn value;
    GradientFn gradient;
};

Evaluable from_global(std::function<double(Point2)> value, std::function<Vec2(Point2)> gradient = nullptr);

struct NodalField {
    SpacePtr space;
    Eigen::VectorXd coeffs;
};

struct ComplexField {
    SpacePtr space;
    Eigen::VectorXcd coeffs;
};

NodalField zero_field(SpacePtr space);

/// Evaluation of interior coefficient vectors inside a given cell.
double local_value(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, const Barycentric& b);
Vec2 local_gradient(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, const Barycentric& b);

Evaluable as_evaluable(const NodalField& u);

/// Basis tables at a fixed list of barycentric points, shared by all cells.
class LocalTables {
public:
    LocalTables(int r, std::vector<Barycentric> points);
    [[nodiscard]] int size() const { return static_cast<int>(points_.size()); }
    [[nodiscard]] const Barycentric& point(int i) const { return points_[i]; }
    [[nodiscard]] double value(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, int i) const;
    [[nodiscard]] Vec2 gradient(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, int i) const;

private:
    int r_;
    int ls_;
    std::vector<Barycentric> points_;
    std::vector<double> values_;
    std::vector<std::array<double, 3>> derivs_;
};

// ---------------------------------------------------------------------------
// Assembly

enum class FormType { mass, stiffness, weighted_mass, weighted_stiffness };

/// Bilinear form selector. Weighted forms integrate sigma^power times the
/// mass or stiffness integrand, so weighted_mass(w, p) is the Gram form of
/// the norm ||sigma^{p/2} v||.
struct FormKind {
    FormType type = FormType::mass;
    std::optional<WeightSpec> weight;
    double power = 0.0;

    static FormKind mass() { return {FormType::mass, std::nullopt, 0.0}; }
    static FormKind stiffness() { return {FormType::stiffness, std::nullopt, 0.0}; }
    static FormKind weighted_mass(const WeightSpec& w, double p) { return {FormType::weighted_mass, w, p}; }
    static FormKind weighted_stiffness(const WeightSpec& w, double p) { return {FormType::weighted_stiffness, w, p}; }
};

/// Local matrix of cell c over all local dofs (boundary included), row-major
/// local_size x local_size.
Eigen::MatrixXd element_matrix(const FeSpace& s, int c, const FormKind& kind);

SparseSym assemble(const FeSpace& s, const FormKind& kind, Exec exec = Exec::parallel);

/// Mass- or stiffness-type form with an arbitrary positive weight function.
SparseSym assemble_weighted(const FeSpace& s, FormType base, const std::function<double(Point2)>& weight,
                            Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Projections and the discrete Laplacian

/// Load vector (v, phi_i) over interior basis functions.
Eigen::VectorXd load_vector(const FeSpace& s, const ScalarFn& v, Exec exec = Exec::parallel);
/// Load vector (g, grad phi_i) for a vector field g.
Eigen::VectorXd gradient_load_vector(const FeSpace& s, const GradientFn& g, Exec exec = Exec::parallel);

enum class ProjectionKind { l2, ritz, nodal };

/// L2 projection, Ritz projection (needs v.gradient) or nodal interpolation.
NodalField project(const SpacePtr& s, const Evaluable& v, ProjectionKind kind);

/// Solves -Delta_h w = f, i.e. A w = M f.
NodalField inv_laplacian(const NodalField& f);
ComplexField inv_laplacian(const ComplexField& f);

/// Delta_h u = -M^{-1} A u.
NodalField discrete_laplacian(const NodalField& u);

// ---------------------------------------------------------------------------
// Point evaluation

/// Throws DomainError outside the mesh. Points on shared edges use the
/// lowest-index containing cell.
double evaluate_value(const NodalField& u, Point2 p);
Vec2 evaluate_gradient(const NodalField& u, Point2 p);

// ---------------------------------------------------------------------------
// Norms

enum class NormTag { l2, l1_sampled, linf_sampled, w1inf_sampled, weighted_l2, weighted_hm1 };

/// weighted_l2(w, p) is ||sigma^{p/2} u||; weighted_hm1(w) is
/// ||sigma^{N/2} grad Delta_h^{-1} u||. The sampled kinds evaluate on the
/// barycentric lattice of sample_lattice(lattice_divisions(r), r) in every
/// cell (sup kinds) or integrate |u| with composite_rule on that lattice (L1).
/// w1inf_sampled is the sampled sup of the Euclidean gradient length.
struct NormKind {
    NormTag tag = NormTag::l2;
    std::optional<WeightSpec> weight;
    double power = 0.0;

    static NormKind l2() { return {NormTag::l2, std::nullopt, 0.0}; }
    static NormKind l1_sampled() { return {NormTag::l1_sampled, std::nullopt, 0.0}; }
    static NormKind linf_sampled() { return {NormTag::linf_sampled, std::nullopt, 0.0}; }
    static NormKind w1inf_sampled() { return {NormTag::w1inf_sampled, std::nullopt, 0.0}; }
    static NormKind weighted_l2(const WeightSpec& w, double p) { return {NormTag::weighted_l2, w, p}; }
    static NormKind weighted_hm1(const WeightSpec& w) { return {NormTag::weighted_hm1, w, static_cast<double>(w.N)}; }

    [[nodiscard]] std::string name() const;
};

/// Throws ValidationError for a weighted kind whose WeightSpec h differs from the mesh h.
double norm(const NodalField& u, const NormKind& kind, Exec exec = Exec::parallel);

/// Quadrature helpers for arbitrary cellwise functions.
double integrate(const Mesh& m, const ScalarFn& f, int degree, Exec exec = Exec::parallel);
double l2_norm_of(const Mesh& m, const ScalarFn& f, int degree, Exec exec = Exec::parallel);
/// Sup of |f| over sample_lattice(lattice_divisions(r), r) in every cell.
double sampled_sup(const Mesh& m, int r, const ScalarFn& f, Exec exec = Exec::parallel);
/// Integral of |f| with composite_rule(lattice_divisions(r), r).
double sampled_l1(const Mesh& m, int r, const ScalarFn& f, Exec exec = Exec::parallel);

} // namespace heatwave
