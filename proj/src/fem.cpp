#include "heatwave/fem.hpp"

#include "heatwave/errors.hpp"

#include <cmath>
#include <sstream>

namespace heatwave {

namespace basis {

int local_size(int r) { return (r + 1) * (r + 2) / 2; }

void values(int r, const Barycentric& b, std::span<double> out)
{
    if (r == 1) {
        out[0] = b[0];
        out[1] = b[1];
        out[2] = b[2];
        return;
    }
    for (int i = 0; i < 3; ++i) {
        out[i] = b[i] * (2.0 * b[i] - 1.0);
    }
    out[3] = 4.0 * b[0] * b[1];
    out[4] = 4.0 * b[1] * b[2];
    out[5] = 4.0 * b[2] * b[0];
}

void bary_derivatives(int r, const Barycentric& b, std::span<std::array<double, 3>> out)
{
    if (r == 1) {
        out[0] = {1.0, 0.0, 0.0};
        out[1] = {0.0, 1.0, 0.0};
        out[2] = {0.0, 0.0, 1.0};
        return;
    }
    out[0] = {4.0 * b[0] - 1.0, 0.0, 0.0};
    out[1] = {0.0, 4.0 * b[1] - 1.0, 0.0};
    out[2] = {0.0, 0.0, 4.0 * b[2] - 1.0};
    out[3] = {4.0 * b[1], 4.0 * b[0], 0.0};
    out[4] = {0.0, 4.0 * b[2], 4.0 * b[1]};
    out[5] = {4.0 * b[2], 0.0, 4.0 * b[0]};
}

} // namespace basis

namespace {

constexpr int kMaxLocal = 6;

const std::array<Barycentric, 6> kLocalNodes = {{
    {1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {0.0, 0.0, 1.0},
    {0.5, 0.5, 0.0},
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
}};

Vec2 physical_gradient(const CellGeometry& g, const std::array<double, 3>& d)
{
    return d[0] * g.grad_bary[0] + d[1] * g.grad_bary[1] + d[2] * g.grad_bary[2];
}

void check_weight_mesh(const WeightSpec& w, const Mesh& m)
{
    if (std::abs(w.h - m.h) > 1e-12 * m.h) {
        throw ValidationError("weight was built for h = " + std::to_string(w.h) + " but the mesh has h = " +
                              std::to_string(m.h));
    }
}

} // namespace

CellGeometry cell_geometry(const Mesh& m, int c)
{
    const auto& t = m.cells[c];
    const Point2 p0 = m.vertices[t[0]], p1 = m.vertices[t[1]], p2 = m.vertices[t[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
    CellGeometry g{0.5 * det, {}};
    g.grad_bary[0] = Vec2(p1.y - p2.y, p2.x - p1.x) / det;
    g.grad_bary[1] = Vec2(p2.y - p0.y, p0.x - p2.x) / det;
    g.grad_bary[2] = Vec2(p0.y - p1.y, p1.x - p0.x) / det;
    return g;
}

FeSpace::FeSpace(MeshPtr mesh, int r) : mesh_(std::move(mesh)), r_(r)
{
    if (r != 1 && r != 2) {
        throw ValidationError("unsupported polynomial degree " + std::to_string(r) + " (expected 1 or 2)");
    }
    const Mesh& m = *mesh_;
    const int ls = basis::local_size(r);
    const int nv = m.n_vertices();
    dof_points_ = m.vertices;
    interior_mask_.resize(nv);
    for (int v = 0; v < nv; ++v) {
        interior_mask_[v] = m.boundary[v] ? 0 : 1;
    }
    cell_dofs_.resize(static_cast<std::size_t>(m.n_cells()) * ls);
    if (r == 2) {
        const auto et = build_edges(m);
        for (std::size_t e = 0; e < et.edges.size(); ++e) {
            dof_points_.push_back(0.5 * (m.vertices[et.edges[e][0]] + m.vertices[et.edges[e][1]]));
            interior_mask_.push_back(et.cells_per_edge[e] == 2 ? 1 : 0);
        }
        for (int c = 0; c < m.n_cells(); ++c) {
            for (int k = 0; k < 3; ++k) {
                cell_dofs_[c * ls + k] = m.cells[c][k];
                cell_dofs_[c * ls + 3 + k] = nv + et.cell_edges[c][k];
            }
        }
    } else {
        for (int c = 0; c < m.n_cells(); ++c) {
            for (int k = 0; k < 3; ++k) {
                cell_dofs_[c * ls + k] = m.cells[c][k];
            }
        }
    }
    const int nd = static_cast<int>(dof_points_.size());
    interior_index_.assign(nd, -1);
    for (int d = 0; d < nd; ++d) {
        if (interior_mask_[d]) {
            interior_index_[d] = static_cast<int>(interior_dofs_.size());
            interior_dofs_.push_back(d);
        }
    }
    cell_interior_.resize(cell_dofs_.size());
    for (std::size_t i = 0; i < cell_dofs_.size(); ++i) {
        cell_interior_[i] = interior_index_[cell_dofs_[i]];
    }
    dof_location_.assign(nd, Location{});
    for (int c = 0; c < m.n_cells(); ++c) {
        for (int k = 0; k < ls; ++k) {
            auto& loc = dof_location_[cell_dofs_[c * ls + k]];
            if (loc.cell < 0) {
                loc = {c, kLocalNodes[k]};
            }
        }
    }
    geometry_.reserve(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c) {
        geometry_.push_back(cell_geometry(m, c));
    }
}

const SparseSym& FeSpace::mass() const
{
    std::call_once(mass_once_, [this] { mass_ = assemble(*this, FormKind::mass()); });
    return mass_;
}

const SparseSym& FeSpace::stiffness() const
{
    std::call_once(stiffness_once_, [this] { stiffness_ = assemble(*this, FormKind::stiffness()); });
    return stiffness_;
}

SpacePtr build_space(MeshPtr mesh, int r) { return std::make_shared<const FeSpace>(std::move(mesh), r); }

// ---------------------------------------------------------------------------

Evaluable from_global(std::function<double(Point2)> value, std::function<Vec2(Point2)> gradient)
{
    Evaluable e;
    e.value = [v = std::move(value)](const CellPoint& p) { return v(p.x); };
    if (gradient) {
        e.gradient = [g = std::move(gradient)](const CellPoint& p) { return g(p.x); };
    }
    return e;
}

NodalField zero_field(SpacePtr space)
{
    const int n = space->n_interior();
    return {std::move(space), Eigen::VectorXd::Zero(n)};
}

double local_value(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, const Barycentric& b)
{
    std::array<double, kMaxLocal> phi{};
    basis::values(s.degree(), b, phi);
    const auto idx = s.cell_interior(cell);
    double v = 0.0;
    for (int a = 0; a < s.local_size(); ++a) {
        if (idx[a] >= 0) {
            v += coeffs[idx[a]] * phi[a];
        }
    }
    return v;
}

Vec2 local_gradient(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, const Barycentric& b)
{
    std::array<std::array<double, 3>, kMaxLocal> d{};
    basis::bary_derivatives(s.degree(), b, d);
    const auto idx = s.cell_interior(cell);
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (int a = 0; a < s.local_size(); ++a) {
        if (idx[a] >= 0) {
            for (int k = 0; k < 3; ++k) {
                acc[k] += coeffs[idx[a]] * d[a][k];
            }
        }
    }
    return physical_gradient(s.geometry(cell), acc);
}

Evaluable as_evaluable(const NodalField& u)
{
    Evaluable e;
    e.value = [u](const CellPoint& p) { return local_value(*u.space, u.coeffs, p.cell, p.bary); };
    e.gradient = [u](const CellPoint& p) { return local_gradient(*u.space, u.coeffs, p.cell, p.bary); };
    return e;
}

LocalTables::LocalTables(int r, std::vector<Barycentric> points)
    : r_(r), ls_(basis::local_size(r)), points_(std::move(points))
{
    values_.resize(points_.size() * ls_);
    derivs_.resize(points_.size() * ls_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        basis::values(r_, points_[i], std::span<double>(values_.data() + i * ls_, ls_));
        basis::bary_derivatives(r_, points_[i], std::span<std::array<double, 3>>(derivs_.data() + i * ls_, ls_));
    }
}

double LocalTables::value(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, int i) const
{
    const auto idx = s.cell_interior(cell);
    const double* phi = values_.data() + static_cast<std::size_t>(i) * ls_;
    double v = 0.0;
    for (int a = 0; a < ls_; ++a) {
        if (idx[a] >= 0) {
            v += coeffs[idx[a]] * phi[a];
        }
    }
    return v;
}

Vec2 LocalTables::gradient(const FeSpace& s, const Eigen::VectorXd& coeffs, int cell, int i) const
{
    const auto idx = s.cell_interior(cell);
    const auto* d = derivs_.data() + static_cast<std::size_t>(i) * ls_;
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (int a = 0; a < ls_; ++a) {
        if (idx[a] >= 0) {
            for (int k = 0; k < 3; ++k) {
                acc[k] += coeffs[idx[a]] * d[a][k];
            }
        }
    }
    return physical_gradient(s.geometry(cell), acc);
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

Eigen::MatrixXd local_form(const FeSpace& s, int c, FormType type, const std::function<double(Point2)>* weight)
{
    const int ls = s.local_size();
    const int r = s.degree();
    const auto& geo = s.geometry(c);
    const Mesh& m = s.mesh();
    const bool stiff = type == FormType::stiffness || type == FormType::weighted_stiffness;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(ls, ls);
    std::array<double, kMaxLocal> phi{};
    std::array<std::array<double, 3>, kMaxLocal> d{};
    std::array<Vec2, kMaxLocal> grad;
    for (const auto& q : element_rule(r).points) {
        double w = q.weight * geo.area;
        if (weight != nullptr) {
            w *= (*weight)(m.point_at(c, q.bary));
        }
        if (stiff) {
            basis::bary_derivatives(r, q.bary, d);
            for (int a = 0; a < ls; ++a) {
                grad[a] = physical_gradient(geo, d[a]);
            }
            for (int a = 0; a < ls; ++a) {
                for (int b = a; b < ls; ++b) {
                    k(a, b) += w * grad[a].dot(grad[b]);
                }
            }
        } else {
            basis::values(r, q.bary, phi);
            for (int a = 0; a < ls; ++a) {
                for (int b = a; b < ls; ++b) {
                    k(a, b) += w * phi[a] * phi[b];
                }
            }
        }
    }
    for (int a = 0; a < ls; ++a) {
        for (int b = 0; b < a; ++b) {
            k(a, b) = k(b, a);
        }
    }
    return k;
}

SparseSym gather(const FeSpace& s, const std::vector<Eigen::MatrixXd>& locals)
{
    const int ls = s.local_size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(locals.size() * ls * ls);
    for (int c = 0; c < static_cast<int>(locals.size()); ++c) {
        const auto idx = s.cell_interior(c);
        for (int a = 0; a < ls; ++a) {
            if (idx[a] < 0) {
                continue;
            }
            for (int b = 0; b < ls; ++b) {
                if (idx[b] >= 0) {
                    trip.emplace_back(idx[a], idx[b], locals[c](a, b));
                }
            }
        }
    }
    SparseMatrix a(s.n_interior(), s.n_interior());
    a.setFromTriplets(trip.begin(), trip.end());
    return SparseSym(std::move(a));
}

std::function<double(Point2)> weight_power(const WeightSpec& w, double p)
{
    return [w, p](Point2 x) { return p == 0.0 ? 1.0 : std::pow(sigma(w, x), p); };
}

} // namespace

Eigen::MatrixXd element_matrix(const FeSpace& s, int c, const FormKind& kind)
{
    if (kind.type == FormType::mass || kind.type == FormType::stiffness) {
        return local_form(s, c, kind.type, nullptr);
    }
    if (!kind.weight) {
        throw ValidationError("weighted form requires a WeightSpec");
    }
    const auto wf = weight_power(*kind.weight, kind.power);
    return local_form(s, c, kind.type, &wf);
}

SparseSym assemble_weighted(const FeSpace& s, FormType base, const std::function<double(Point2)>& weight, Exec exec)
{
    std::vector<Eigen::MatrixXd> locals(s.mesh().n_cells());
    for_each_cell(s.mesh().n_cells(), exec, [&](int c) { locals[c] = local_form(s, c, base, weight ? &weight : nullptr); });
    return gather(s, locals);
}

SparseSym assemble(const FeSpace& s, const FormKind& kind, Exec exec)
{
    switch (kind.type) {
    case FormType::mass:
    case FormType::stiffness:
        return assemble_weighted(s, kind.type, nullptr, exec);
    case FormType::weighted_mass:
    case FormType::weighted_stiffness:
        if (!kind.weight) {
            throw ValidationError("weighted form requires a WeightSpec");
        }
        return assemble_weighted(s, kind.type, weight_power(*kind.weight, kind.power), exec);
    }
    throw ValidationError("unknown form type");
}

// ---------------------------------------------------------------------------
// Loads and projections

namespace {

template <class Local>
Eigen::VectorXd scatter_load(const FeSpace& s, Exec exec, Local&& local)
{
    const int ls = s.local_size();
    const int nc = s.mesh().n_cells();
    std::vector<double> parts(static_cast<std::size_t>(nc) * ls, 0.0);
    for_each_cell(nc, exec, [&](int c) { local(c, parts.data() + static_cast<std::size_t>(c) * ls); });
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.n_interior());
    for (int c = 0; c < nc; ++c) {
        const auto idx = s.cell_interior(c);
        for (int a = 0; a < ls; ++a) {
            if (idx[a] >= 0) {
                b[idx[a]] += parts[static_cast<std::size_t>(c) * ls + a];
            }
        }
    }
    return b;
}

} // namespace

Eigen::VectorXd load_vector(const FeSpace& s, const ScalarFn& v, Exec exec)
{
    const Mesh& m = s.mesh();
    const int r = s.degree();
    const int ls = s.local_size();
    return scatter_load(s, exec, [&](int c, double* out) {
        std::array<double, kMaxLocal> phi{};
        const double area = s.geometry(c).area;
        for (const auto& q : element_rule(r).points) {
            const double fv = v(CellPoint{c, m.point_at(c, q.bary), q.bary});
            basis::values(r, q.bary, phi);
            for (int a = 0; a < ls; ++a) {
                out[a] += q.weight * area * fv * phi[a];
            }
        }
    });
}

Eigen::VectorXd gradient_load_vector(const FeSpace& s, const GradientFn& g, Exec exec)
{
    const Mesh& m = s.mesh();
    const int r = s.degree();
    const int ls = s.local_size();
    return scatter_load(s, exec, [&](int c, double* out) {
        std::array<std::array<double, 3>, kMaxLocal> d{};
        const auto& geo = s.geometry(c);
        for (const auto& q : element_rule(r).points) {
            const Vec2 gv = g(CellPoint{c, m.point_at(c, q.bary), q.bary});
            basis::bary_derivatives(r, q.bary, d);
            for (int a = 0; a < ls; ++a) {
                out[a] += q.weight * geo.area * gv.dot(physical_gradient(geo, d[a]));
            }
        }
    });
}

NodalField project(const SpacePtr& s, const Evaluable& v, ProjectionKind kind)
{
    switch (kind) {
    case ProjectionKind::nodal: {
        Eigen::VectorXd u(s->n_interior());
        for (int i = 0; i < s->n_interior(); ++i) {
            const int dof = s->interior_dofs()[i];
            const auto& loc = s->dof_location(dof);
            u[i] = v.value(CellPoint{loc.cell, s->dof_points()[dof], loc.bary});
        }
        return {s, u};
    }
    case ProjectionKind::l2:
        return {s, s->mass().solve(load_vector(*s, v.value))};
    case ProjectionKind::ritz:
        if (!v.gradient) {
            throw ValidationError("Ritz projection needs the gradient of the projected function");
        }
        return {s, s->stiffness().solve(gradient_load_vector(*s, v.gradient))};
    }
    throw ValidationError("unknown projection kind");
}

NodalField inv_laplacian(const NodalField& f)
{
    return {f.space, f.space->stiffness().solve(Eigen::VectorXd(f.space->mass().apply(f.coeffs)))};
}

ComplexField inv_laplacian(const ComplexField& f)
{
    return {f.space, f.space->stiffness().solve(Eigen::VectorXcd(f.space->mass().apply(f.coeffs)))};
}

NodalField discrete_laplacian(const NodalField& u)
{
    return {u.space, -u.space->mass().solve(Eigen::VectorXd(u.space->stiffness().apply(u.coeffs)))};
}

double evaluate_value(const NodalField& u, Point2 p)
{
    const auto loc = locate_point(u.space->mesh(), p);
    return local_value(*u.space, u.coeffs, loc.cell, loc.bary);
}

Vec2 evaluate_gradient(const NodalField& u, Point2 p)
{
    const auto loc = locate_point(u.space->mesh(), p);
    return local_gradient(*u.space, u.coeffs, loc.cell, loc.bary);
}

// ---------------------------------------------------------------------------
// Norms

std::string NormKind::name() const
{
    switch (tag) {
    case NormTag::l2:
        return "L2";
    case NormTag::l1_sampled:
        return "L1_sampled";
    case NormTag::linf_sampled:
        return "Linf_sampled";
    case NormTag::w1inf_sampled:
        return "W1inf_sampled";
    case NormTag::weighted_l2: {
        std::ostringstream os;
        os << "weighted_L2(p=" << power << ")";
        return os.str();
    }
    case NormTag::weighted_hm1:
        return "weighted_Hm1";
    }
    return "?";
}

double integrate(const Mesh& m, const ScalarFn& f, int degree, Exec exec)
{
    const auto& rule = triangle_rule(degree);
    return cell_sum(m.n_cells(), exec, [&](int c) {
        double s = 0.0;
        for (const auto& q : rule.points) {
            s += q.weight * f(CellPoint{c, m.point_at(c, q.bary), q.bary});
        }
        return s * m.cell_area(c);
    });
}

double l2_norm_of(const Mesh& m, const ScalarFn& f, int degree, Exec exec)
{
    return std::sqrt(integrate(
        m,
        [&](const CellPoint& p) {
            const double v = f(p);
            return v * v;
        },
        degree, exec));
}

double sampled_sup(const Mesh& m, int r, const ScalarFn& f, Exec exec)
{
    const auto pts = sample_lattice(lattice_divisions(r), r);
    return cell_max(m.n_cells(), exec, [&](int c) {
        double mx = 0.0;
        for (const auto& b : pts) {
            mx = std::max(mx, std::abs(f(CellPoint{c, m.point_at(c, b), b})));
        }
        return mx;
    });
}

double sampled_l1(const Mesh& m, int r, const ScalarFn& f, Exec exec)
{
    const auto rule = composite_rule(lattice_divisions(r), r);
    return cell_sum(m.n_cells(), exec, [&](int c) {
        double s = 0.0;
        for (const auto& q : rule) {
            s += q.weight * std::abs(f(CellPoint{c, m.point_at(c, q.bary), q.bary}));
        }
        return s * m.cell_area(c);
    });
}

double norm(const NodalField& u, const NormKind& kind, Exec exec)
{
    const FeSpace& s = *u.space;
    const Mesh& m = s.mesh();
    const int r = s.degree();
    switch (kind.tag) {
    case NormTag::l2:
        return std::sqrt(std::max(0.0, s.mass().quad(u.coeffs)));
    case NormTag::linf_sampled: {
        const LocalTables tab(r, sample_lattice(lattice_divisions(r), r));
        return cell_max(m.n_cells(), exec, [&](int c) {
            double mx = 0.0;
            for (int i = 0; i < tab.size(); ++i) {
                mx = std::max(mx, std::abs(tab.value(s, u.coeffs, c, i)));
            }
            return mx;
        });
    }
    case NormTag::w1inf_sampled: {
        const LocalTables tab(r, sample_lattice(lattice_divisions(r), r));
        return cell_max(m.n_cells(), exec, [&](int c) {
            double mx = 0.0;
            for (int i = 0; i < tab.size(); ++i) {
                mx = std::max(mx, tab.gradient(s, u.coeffs, c, i).norm());
            }
            return mx;
        });
    }
    case NormTag::l1_sampled:
        return sampled_l1(
            m, r, [&](const CellPoint& p) { return local_value(s, u.coeffs, p.cell, p.bary); }, exec);
    case NormTag::weighted_l2: {
        if (!kind.weight) {
            throw ValidationError("weighted norm requires a WeightSpec");
        }
        check_weight_mesh(*kind.weight, m);
        const auto g = assemble(s, FormKind::weighted_mass(*kind.weight, kind.power), exec);
        return std::sqrt(std::max(0.0, g.quad(u.coeffs)));
    }
    case NormTag::weighted_hm1: {
        if (!kind.weight) {
            throw ValidationError("weighted norm requires a WeightSpec");
        }
        check_weight_mesh(*kind.weight, m);
        const auto w = inv_laplacian(u);
        const auto g = assemble(s, FormKind::weighted_stiffness(*kind.weight, kind.weight->N), exec);
        return std::sqrt(std::max(0.0, g.quad(w.coeffs)));
    }
    }
    throw ValidationError("unknown norm kind");
}

} // namespace heatwave
