#include "oneform.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace anyonprep {
namespace oneform {

namespace {

// The window machinery works on gauge theories of grp: every label invertible
// and the label set realizing the group itself.
void validate_window_theory(const stringnet::Context& ctx, const AbelianGroup& grp) {
    const FusionCategory& cat = *ctx.cat;
    if (cat.num_objects() != grp.order())
        throw validation_error("window: category labels do not realize the group");
    for (int a = 0; a < cat.num_objects(); ++a)
        if (std::abs(cat.dim(a) - 1.0) > TOL_ALGEBRA)
            throw validation_error("window: every quantum dimension must be 1");
}

void validate_region(const Lattice::Region& region) {
    if (!region.connected) throw validation_error("window: region must be connected");
    if (!region.disk) throw validation_error("window: region must be a disk");
}

// rotate_register convention: u[new][old]. The Fourier frame diagonalizes the
// edge shifts, S_a |phi> = chi_phi(a) |phi>.
std::vector<std::vector<cplx>> fourier_frame(const AbelianGroup& grp) {
    int n = grp.order();
    double w = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<std::vector<cplx>> u(n, std::vector<cplx>(n));
    for (int phi = 0; phi < n; ++phi)
        for (int c = 0; c < n; ++c) u[phi][c] = grp.character(phi, c) * w;
    return u;
}

std::vector<std::vector<cplx>> adjoint_frame(const std::vector<std::vector<cplx>>& u) {
    int n = static_cast<int>(u.size());
    std::vector<std::vector<cplx>> v(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v[i][j] = std::conj(u[j][i]);
    return v;
}

// Permutation kernel adding g to a register's label.
SparseState shift_register(const SparseState& s, int reg, const AbelianGroup& grp, int g) {
    int n = grp.order();
    std::vector<std::vector<cplx>> u(n, std::vector<cplx>(n, 0.0));
    for (int old = 0; old < n; ++old) u[grp.add(old, g)][old] = 1.0;
    return rotate_register(s, reg, u);
}

// Vertex order of the region's matter registers, with their register ids.
std::vector<std::pair<int, int>> matter_registers(const SparseState& s,
                                                  const Lattice::Region& region) {
    std::vector<std::pair<int, int>> out;
    for (int v : region.inner_vertices) {
        int reg = s.layout->find(Layout::Kind::VertexAncilla, v);
        if (reg < 0) throw validation_error("window: matter register missing, region not ungauged");
        out.push_back({v, reg});
    }
    return out;
}

// Inner vertices sorted root-first by tree depth, with children after their
// parents. Used for the potential solve (top down) and the charge push
// (bottom up, reversed).
std::vector<int> tree_order(const Lattice::Region& region) {
    std::map<int, int> depth;
    depth[region.tree_root] = 0;
    std::vector<int> order = {region.tree_root};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [v, u] : region.tree_parent_vertex) {
            if (depth.count(v) || !depth.count(u)) continue;
            depth[v] = depth.at(u) + 1;
            order.push_back(v);
            grew = true;
        }
    }
    if (order.size() != region.inner_vertices.size())
        throw validation_error("window: region interior is not spanned by its tree");
    return order;
}

}  // namespace

std::pair<SparseState, UngaugeOutcome> ungauge_region(const stringnet::Context& ctx,
                                                      const SparseState& s,
                                                      const Lattice::Region& region,
                                                      const AbelianGroup& grp, Rng& rng) {
    validate_window_theory(ctx, grp);
    UngaugeOutcome out;
    if (region.faces.empty() || region.inner_vertices.empty()) return {s, out};
    validate_region(region);
    const Lattice& lat = *ctx.lat;
    int n = grp.order();

    // Matter in |+> over the inner vertices. Each register is attached right
    // before its first Gauss measurement: attaching everything up front would
    // blow the term count up by a factor n^V before the measurements collapse
    // the matter onto the edge sector.
    SparseState cur = s;
    std::vector<cplx> plus(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::map<int, int> vreg;
    auto ensure_matter = [&](int v) {
        if (vreg.count(v)) return;
        auto bigger = cur.layout->with_register(Layout::Kind::VertexAncilla, v, n);
        cur = with_new_register(cur, bigger, bigger->num_registers() - 1, plus);
        vreg[v] = bigger->num_registers() - 1;
    };

    // Gauss measurement per interior edge (edge-index order): in the edge's
    // Fourier frame the family is the classical label m_from - m_to + phi.
    auto fr = fourier_frame(grp);
    auto fr_inv = adjoint_frame(fr);
    std::vector<int> edges_sorted = region.interior_edges;
    std::sort(edges_sorted.begin(), edges_sorted.end());

    // 1-form symmetry check: trivial outcome holonomy around every deep face,
    // verified the moment the face's boundary finishes. Aborting at the first
    // violated face keeps a bad run from growing the state any further.
    std::map<int, int> pending;
    for (int f : region.deep_faces)
        pending[f] = static_cast<int>(lat.face(f).edge.size());
    std::map<int, int> g_e;
    auto face_done = [&](int f) {
        const auto& fc = lat.face(f);
        int hol = grp.identity();
        for (size_t j = 0; j < fc.edge.size(); ++j) {
            int g = g_e.at(fc.edge[j]);
            hol = grp.add(hol, fc.along[j] ? g : grp.neg(g));
        }
        if (hol != grp.identity())
            throw check_error("ungauge region: outcome holonomy is nontrivial");
    };
    for (int e : edges_sorted) {
        ensure_matter(lat.edge(e).from);
        ensure_matter(lat.edge(e).to);
        int rf = vreg.at(lat.edge(e).from), rt = vreg.at(lat.edge(e).to);
        int re = cur.layout->find(Layout::Kind::Edge, e);
        cur = rotate_register(cur, re, fr);
        auto lay = cur.layout;
        int outcome = measure_value(
            cur,
            [lay, rf, rt, re, &grp](const Key& k) {
                return grp.add(grp.add(lay->get(k, rf), grp.neg(lay->get(k, rt))),
                               lay->get(k, re));
            },
            rng);
        cur = rotate_register(cur, re, fr_inv);
        out.edges.push_back(e);
        out.edge_outcome.push_back(outcome);
        g_e[e] = outcome;
        for (int f : {lat.edge(e).left_face, lat.edge(e).right_face}) {
            auto it = pending.find(f);
            if (it != pending.end() && --it->second == 0) face_done(f);
        }
    }

    // potential solve, root anchored at the identity
    auto order = tree_order(region);
    std::map<int, int> g_v;
    g_v[region.tree_root] = grp.identity();
    for (int v : order) {
        if (v == region.tree_root) continue;
        int u = region.tree_parent_vertex.at(v);
        int e = region.tree_parent_edge.at(v);
        int ge = g_e.at(e);
        g_v[v] = lat.edge(e).from == u ? grp.add(g_v.at(u), grp.neg(ge))
                                       : grp.add(g_v.at(u), ge);
    }
    for (int e : region.interior_edges) {
        int expect = grp.add(g_v.at(lat.edge(e).from), grp.neg(g_v.at(lat.edge(e).to)));
        if (expect != g_e.at(e))
            throw check_error("ungauge region: outcome pattern is not a coboundary");
    }

    // byproduct: shift every matter register back to the trivial-outcome branch
    for (int v : region.inner_vertices) {
        out.vertices.push_back(v);
        out.potential.push_back(g_v.at(v));
        if (g_v.at(v) != grp.identity()) {
            cur = shift_register(cur, vreg.at(v), grp, grp.neg(g_v.at(v)));
            out.byproduct.push_back(v);
        }
    }
    return {cur, out};
}

SparseState regauge_region(const stringnet::Context& ctx, const SparseState& s,
                           const Lattice::Region& region, const AbelianGroup& grp, Rng& rng,
                           std::vector<int>* charges_out) {
    validate_window_theory(ctx, grp);
    if (region.faces.empty() || region.inner_vertices.empty()) return s;
    validate_region(region);
    const Lattice& lat = *ctx.lat;
    int n = grp.order();
    SparseState cur = s;
    auto regs = matter_registers(cur, region);

    // character-basis measurement, vertex order
    double w = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<std::vector<cplx>> basis(n, std::vector<cplx>(n));
    for (int chi = 0; chi < n; ++chi)
        for (int m = 0; m < n; ++m) basis[chi][m] = std::conj(grp.character(chi, m)) * w;
    std::map<int, int> chi_v;
    int total = grp.identity();
    for (const auto& [v, reg] : regs) {
        cur = rotate_register(cur, reg, basis);
        auto lay = cur.layout;
        int chi = measure_value(
            cur, [lay, reg](const Key& k) { return lay->get(k, reg); }, rng);
        chi_v[v] = chi;
        total = grp.add(total, chi);
        if (charges_out) charges_out->push_back(chi);
    }
    if (total != grp.identity())
        throw check_error("regauge region: vertex charges do not fuse to vacuum");

    // push every measured charge to the tree root with edge shift strings
    auto order = tree_order(region);
    std::map<int, int> below = chi_v;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (v == region.tree_root) continue;
        int u = region.tree_parent_vertex.at(v);
        int e = region.tree_parent_edge.at(v);
        below[u] = grp.add(below.at(u), below.at(v));
        int chain = lat.edge(e).from == u ? below.at(v) : grp.neg(below.at(v));
        if (chain != grp.identity())
            cur = shift_register(cur, cur.layout->find(Layout::Kind::Edge, e), grp, chain);
    }

    // retire the matter registers, highest index first
    std::sort(regs.begin(), regs.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [v, reg] : regs) {
        std::vector<cplx> known(n, 0.0);
        known[chi_v.at(v)] = 1.0;
        cur = contract_register(cur, reg, known);
    }
    return cur;
}

SparseState matter_shift(const SparseState& s, const Lattice::Region& region,
                         const AbelianGroup& grp, int g) {
    SparseState cur = s;
    for (int v : region.inner_vertices) {
        int reg = cur.layout->find(Layout::Kind::VertexAncilla, v);
        if (reg < 0) throw validation_error("window: matter register missing, region not ungauged");
        cur = shift_register(cur, reg, grp, g);
    }
    return cur;
}

SparseState apply_symmetric_in_window(const stringnet::Context& ctx, const SparseState& s,
                                      const Lattice::Region& region, const AbelianGroup& grp,
                                      const WindowOp& op, Rng& rng) {
    auto [open, rec] = ungauge_region(ctx, s, region, grp, rng);
    if (rec.vertices.empty()) return regauge_region(ctx, op(ctx, open), region, grp, rng);
    // commutation pre-check against the residual uniform matter shift on the
    // dense block spanned by the window state
    for (int g = 1; g < grp.order(); ++g) {
        SparseState a = op(ctx, matter_shift(open, region, grp, g));
        SparseState b = matter_shift(op(ctx, open), region, grp, g);
        double d2 = add(a, b, cplx{-1.0, 0.0}).norm2();
        if (std::sqrt(d2) > TOL_EIG)
            throw check_error("window operator breaks the residual symmetry");
    }
    return regauge_region(ctx, op(ctx, open), region, grp, rng);
}

std::string window_to_text(const UngaugeOutcome& out, const std::vector<int>& vertex_charges) {
    std::ostringstream os;
    os << "window\n";
    for (size_t i = 0; i < out.edges.size(); ++i)
        os << "  e " << out.edges[i] << " " << out.edge_outcome[i] << "\n";
    for (size_t i = 0; i < out.vertices.size(); ++i)
        os << "  v " << out.vertices[i] << " " << out.potential[i] << "\n";
    for (size_t i = 0; i < vertex_charges.size() && i < out.vertices.size(); ++i)
        os << "  q " << out.vertices[i] << " " << vertex_charges[i] << "\n";
    return os.str();
}

}  // namespace oneform
}  // namespace anyonprep
