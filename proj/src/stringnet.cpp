#include "stringnet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace anyonprep {
namespace stringnet {

namespace {

int read_along(const FusionCategory& cat, int label, bool along) {
    return along ? label : cat.dual(label);
}

}  // namespace

bool vertex_valid(const Context& ctx, const Layout& lay, const Key& k, int v) {
    const auto star = ctx.lat->vertex_star(v);
    if (star.size() == 1) return true;  // puncture: free end
    if (star.size() != 3) throw check_error("vertex is neither trivalent nor a puncture");
    // the three labels, read outgoing, must admit the unit: unit in x y z
    int x = read_along(*ctx.cat, lay.get(k, star[0].first), star[0].second);
    int y = read_along(*ctx.cat, lay.get(k, star[1].first), star[1].second);
    int z = read_along(*ctx.cat, lay.get(k, star[2].first), star[2].second);
    return ctx.cat->n(x, y, ctx.cat->dual(z));
}

bool config_valid(const Context& ctx, const Layout& lay, const Key& k) {
    for (int v = 0; v < ctx.lat->num_vertices(); ++v)
        if (!vertex_valid(ctx, lay, k, v)) return false;
    return true;
}

bool state_valid(const Context& ctx, const SparseState& s) {
    for (const auto& [k, a] : s.amp)
        if (!config_valid(ctx, *s.layout, k)) return false;
    return true;
}

SparseState project_valid(const Context& ctx, const SparseState& s) {
    return apply_diag(s, [&](const Key& k) {
        return config_valid(ctx, *s.layout, k) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    });
}

SparseState vacuum_state(const Context&, std::shared_ptr<const Layout> lay) {
    return make_basis_state(std::move(lay), Key{});
}

SparseState apply_loop(const Context& ctx, const SparseState& s, int face, int label,
                       const std::optional<TubeSpec>& tube) {
    const FusionCategory& cat = *ctx.cat;
    const Lattice& lat = *ctx.lat;
    const Lattice::Face& fc = lat.face(face);
    const auto corners = lat.corners(face);
    const int n = static_cast<int>(corners.size());
    if (fc.tail_edge >= 0 && !tube)
        throw check_error("loop on a punctured face needs a tube channel");
    if (fc.tail_edge < 0 && tube) throw check_error("tube channel on a face without a tail");
    if (tube && (!cat.n(label, tube->r, tube->q) || !cat.n(tube->p, label, tube->q)))
        throw check_error("tube channel is inadmissible");

    // Support: the boundary segments in walk order, then the tail, then the
    // corner legs (deduplicated; the tail corner's leg is the tail itself).
    std::vector<int> regs(fc.edge.begin(), fc.edge.end());
    int tail_at = -1;
    if (tube) {
        tail_at = static_cast<int>(regs.size());
        regs.push_back(fc.tail_edge);
    }
    std::vector<int> leg_at(n);
    for (int j = 0; j < n; ++j) {
        int e = corners[j].leg_edge;
        auto it = std::find(regs.begin(), regs.end(), e);
        if (it == regs.end()) {
            leg_at[j] = static_cast<int>(regs.size());
            regs.push_back(e);
        } else {
            leg_at[j] = static_cast<int>(it - regs.begin());
        }
    }

    const int sl = label;
    auto kernel = [&, sl, n, tail_at](const std::vector<int>& vals, const EmitFn& emit) {
        if (tube && vals[tail_at] != tube->r) return;  // this tube moves tail r to p

        // boundary labels read along the walk, legs read outward
        std::vector<int> t(n), m(n);
        for (int j = 0; j < n; ++j) {
            t[j] = read_along(cat, vals[j], fc.along[j] != 0);
            m[j] = read_along(cat, vals[leg_at[j]], corners[j].leg_outward);
        }

        // each ket corner must be an admissible splitting t_in -> t_out (x) leg,
        // otherwise the configuration lies outside the string-net subspace
        for (int j = 0; j < n; ++j) {
            int jin = (j + n - 1) % n;
            if (!cat.n(t[j], m[j], t[jin])) return;
        }

        std::vector<int> tp(n);
        auto corner_factor = [&](int j) -> cplx {
            int jin = (j + n - 1) % n;
            if (corners[j].tail_corner) {
                cplx f1 = std::conj(cat.F(sl, tube->r, t[j], tp[jin], tube->q, t[jin]));
                cplx f2 = cat.F(tube->p, sl, t[j], tp[jin], tube->q, tp[j]);
                double w = std::sqrt(cat.dim(sl) * cat.dim(tube->r) / cat.dim(tube->q));
                return f1 * f2 * w;
            }
            return std::conj(cat.F(sl, t[j], m[j], tp[jin], tp[j], t[jin]));
        };
        auto close_and_emit = [&](cplx acc) {
            std::vector<int> nv = vals;
            for (int j = 0; j < n; ++j) nv[j] = fc.along[j] ? tp[j] : cat.dual(tp[j]);
            if (tube) nv[tail_at] = tube->p;
            emit(nv, acc);
        };
        // depth-first over the fused boundary labels tp[j] in s x t_j; the
        // factor of corner j needs tp[j-1] and tp[j], so corner 0 closes the
        // cycle after the last segment is chosen
        std::function<void(int, cplx)> dfs = [&](int j, cplx acc) {
            if (j == n) {
                cplx f = corner_factor(0);
                if (std::abs(f) > 0.0) close_and_emit(acc * f);
                return;
            }
            for (int cand : cat.fuse(sl, t[j])) {
                tp[j] = cand;
                if (j == 0) {
                    dfs(1, acc);
                } else if (cplx f = corner_factor(j); std::abs(f) > 0.0) {
                    dfs(j + 1, acc * f);
                }
            }
        };
        dfs(0, cplx{1.0, 0.0});
    };

    return apply_kernel(s, regs, kernel);
}

SparseState apply_flux(const Context& ctx, const SparseState& s, int face) {
    const FusionCategory& cat = *ctx.cat;
    const bool tailed = ctx.lat->face(face).tail_edge >= 0;
    SparseState acc{s.layout, {}};
    const double d2 = cat.total_dim2();
    for (int a = 0; a < cat.num_objects(); ++a) {
        std::optional<TubeSpec> tube;
        if (tailed) tube = TubeSpec{0, a, 0};
        acc = add(acc, apply_loop(ctx, s, face, a, tube), cat.dim(a) / d2);
    }
    return acc;
}

SparseState apply_graded(const Context& ctx, const SparseState& s, int face, int lv, int g) {
    const FusionCategory& cat = *ctx.cat;
    const bool tailed = ctx.lat->face(face).tail_edge >= 0;
    SparseState acc{s.layout, {}};
    const double d2 = cat.trivial_sector_dim2(lv);
    for (int a : cat.sector_objects(lv, g)) {
        std::optional<TubeSpec> tube;
        if (tailed) tube = TubeSpec{0, a, 0};
        acc = add(acc, apply_loop(ctx, s, face, a, tube), cat.dim(a) / d2);
    }
    return acc;
}

double flux_expectation(const Context& ctx, const SparseState& s, int face) {
    return inner(s, apply_flux(ctx, s, face)).real() / s.norm2();
}

SparseState apply_char_string(const Context& ctx, const SparseState& s, int lv, int chi,
                              const std::vector<Lattice::Crossing>& path) {
    const FusionCategory& cat = *ctx.cat;
    const AbelianGroup& grp = cat.levels()[lv - 1].group;
    return apply_diag(s, [&, lv, chi, path](const Key& k) {
        cplx phase{1.0, 0.0};
        for (const auto& c : path) {
            int g = cat.sector_of(lv, s.layout->get(k, c.edge));
            phase *= grp.character(chi, c.left_to_right ? g : grp.neg(g));
        }
        return phase;
    });
}

SparseState apply_shift_string(const Context& ctx, const SparseState& s, int g,
                               const std::vector<std::pair<int, bool>>& edge_path) {
    const FusionCategory& cat = *ctx.cat;
    for (int a = 0; a < cat.num_objects(); ++a)
        if (std::abs(cat.dim(a) - 1.0) > TOL_ALGEBRA)
            throw check_error("shift strings need every quantum dimension equal to 1");
    const AbelianGroup& grp = cat.levels().front().group;
    // accumulate the net shift per edge so revisited edges compose correctly
    std::vector<int> regs;
    std::vector<int> shift;
    for (const auto& [e, fwd] : edge_path) {
        int delta = fwd ? g : grp.neg(g);
        auto it = std::find(regs.begin(), regs.end(), e);
        if (it == regs.end()) {
            regs.push_back(e);
            shift.push_back(delta);
        } else {
            shift[it - regs.begin()] = grp.add(shift[it - regs.begin()], delta);
        }
    }
    return apply_kernel(s, regs, [&grp, shift](const std::vector<int>& vals, const EmitFn& emit) {
        std::vector<int> nv = vals;
        for (size_t i = 0; i < nv.size(); ++i) nv[i] = grp.add(nv[i], shift[i]);
        emit(nv, cplx{1.0, 0.0});
    });
}

SparseState ground_state(const Context& ctx, std::shared_ptr<const Layout> lay) {
    SparseState s = vacuum_state(ctx, std::move(lay));
    for (int f = 0; f < ctx.lat->num_faces(); ++f) s = apply_flux(ctx, s, f);
    return s.normalized();
}

}  // namespace stringnet
}  // namespace anyonprep
