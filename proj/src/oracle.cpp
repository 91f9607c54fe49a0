#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anyonprep {
namespace oracle {

namespace {

// Assign edges in a breadth-first adjacency order so that vertices complete
// (and prune the search) as early as possible.
std::vector<int> edge_order(const Lattice& lat) {
    std::vector<int> order;
    std::vector<char> seen(lat.num_edges(), 0);
    std::vector<std::vector<int>> at_vertex(lat.num_vertices());
    for (int e = 0; e < lat.num_edges(); ++e) {
        at_vertex[lat.edge(e).from].push_back(e);
        at_vertex[lat.edge(e).to].push_back(e);
    }
    for (int start = 0; start < lat.num_edges(); ++start) {
        if (seen[start]) continue;
        std::queue<int> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            int e = q.front();
            q.pop();
            order.push_back(e);
            for (int v : {lat.edge(e).from, lat.edge(e).to})
                for (int e2 : at_vertex[v])
                    if (!seen[e2]) {
                        seen[e2] = 1;
                        q.push(e2);
                    }
        }
    }
    return order;
}

cplx amplitude_at(const SparseState& s, const Key& k) {
    auto it = std::lower_bound(s.amp.begin(), s.amp.end(), k,
                               [](const auto& p, const Key& kk) { return p.first < kk; });
    if (it == s.amp.end() || !(it->first == k)) return {0.0, 0.0};
    return it->second;
}

}  // namespace

std::vector<Key> enumerate_configs(const stringnet::Context& ctx,
                                   const std::shared_ptr<const Layout>& lay,
                                   const std::vector<int>& enforce_vertices,
                                   const std::function<bool(const Key&)>& filter, long guard) {
    const Lattice& lat = *ctx.lat;
    if (lay->num_registers() != lay->num_edge_registers())
        throw check_error("configuration enumeration expects an edge-only layout");

    auto order = edge_order(lat);
    const int ne = static_cast<int>(order.size());
    std::vector<int> pos(ne);
    for (int i = 0; i < ne; ++i) pos[order[i]] = i;

    // vertices to check as soon as their last incident edge is assigned
    std::vector<std::vector<int>> check_at(ne);
    for (int v : enforce_vertices) {
        auto star = lat.vertex_star(v);
        int last = 0;
        for (auto [e, out] : star) last = std::max(last, pos[e]);
        check_at[last].push_back(v);
    }

    std::vector<Key> out;
    Key k{};
    std::function<void(int)> dfs = [&](int i) {
        if (i == ne) {
            if (!filter || filter(k)) {
                if (static_cast<long>(out.size()) >= guard)
                    throw resource_error("configuration enumeration exceeds the guard");
                out.push_back(k);
            }
            return;
        }
        int e = order[i];
        for (int val = 0; val < lay->reg(e).radix; ++val) {
            lay->set(k, e, val);
            bool ok = true;
            for (int v : check_at[i])
                if (!stringnet::vertex_valid(ctx, *lay, k, v)) {
                    ok = false;
                    break;
                }
            if (ok) dfs(i + 1);
        }
        lay->set(k, e, 0);
    };
    dfs(0);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Key> enumerate_valid(const stringnet::Context& ctx,
                                 const std::shared_ptr<const Layout>& lay, long guard) {
    std::vector<int> all(ctx.lat->num_vertices());
    for (int v = 0; v < ctx.lat->num_vertices(); ++v) all[v] = v;
    return enumerate_configs(ctx, lay, all, {}, guard);
}

double ground_space_dim(const FusionCategory& cat, const Lattice& lat, bool parallel) {
    stringnet::Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());
    auto basis = enumerate_valid(ctx, lay);
    const int nf = lat.num_faces();

    // edges whose adjacent faces are both processed are pinned to the target
    // configuration; pruning them keeps the expansion small
    std::vector<std::vector<int>> frozen_after(nf);
    for (int e = 0; e < lat.num_edges(); ++e) {
        int last = std::max(lat.edge(e).left_face, lat.edge(e).right_face);
        frozen_after[last].push_back(e);
    }

    auto term = [&](const Key& c) {
        SparseState s = make_basis_state(lay, c);
        for (int f = 0; f < nf; ++f) {
            s = stringnet::apply_flux(ctx, s, f);
            const auto& frz = frozen_after[f];
            if (!frz.empty()) {
                s = apply_diag(s, [&](const Key& k) {
                    for (int e : frz)
                        if (lay->get(k, e) != lay->get(c, e)) return cplx{0.0, 0.0};
                    return cplx{1.0, 0.0};
                });
            }
        }
        return amplitude_at(s, c).real();
    };

    // fixed-size chunks with an ordered final reduction: the worker count
    // never changes the result
    const long n = static_cast<long>(basis.size());
    const long chunk = 256;
    const long nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long ci = 0; ci < nchunks; ++ci) {
        double acc = 0.0;
        long hi = std::min(n, (ci + 1) * chunk);
        for (long i = ci * chunk; i < hi; ++i) acc += term(basis[i]);
        partial[ci] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

namespace {

struct SigmaSetup {
    int sigma = -1;          // the unique non-invertible object
    const AbelianGroup* grp = nullptr;
    std::vector<char> in_region;
    std::vector<int> interior;  // edges with both faces in the region
};

SigmaSetup analyze_spec(const FusionCategory& cat, const Lattice& lat,
                        const SigmaLoopSpec& spec) {
    SigmaSetup su;
    for (int a = 0; a < cat.num_objects(); ++a) {
        if (cat.dim(a) > 1.0 + TOL_ALGEBRA) {
            if (su.sigma >= 0) throw check_error("expected a single non-invertible object");
            su.sigma = a;
        }
    }
    if (su.sigma < 0) throw check_error("category has no non-invertible loop label");
    if (cat.levels().empty()) throw check_error("category carries no grading series");
    su.grp = &cat.levels().front().group;
    if (su.grp->order() != su.sigma)
        throw check_error("group objects must precede the non-invertible one");

    if (spec.region.empty()) throw check_error("empty loop region");
    su.in_region.assign(lat.num_faces(), 0);
    for (int f : spec.region) {
        if (f < 0 || f >= lat.num_faces()) throw check_error("region face out of range");
        if (lat.face(f).tail_edge >= 0) throw check_error("loop regions must be tail-free");
        if (su.in_region[f]) throw check_error("region face repeated");
        su.in_region[f] = 1;
    }
    if (static_cast<int>(spec.outside_k.size()) != lat.num_faces())
        throw check_error("outside label list must cover every face");
    for (int f = 0; f < lat.num_faces(); ++f)
        if (!su.in_region[f] && (spec.outside_k[f] < 0 || spec.outside_k[f] >= su.grp->order()))
            throw check_error("outside label out of range");

    for (int e = 0; e < lat.num_edges(); ++e)
        if (su.in_region[lat.edge(e).left_face] && su.in_region[lat.edge(e).right_face])
            su.interior.push_back(e);
    std::vector<int> listed;
    for (auto [e, b] : spec.chords) {
        listed.push_back(e);
        if (b < 0 || b >= su.grp->order()) throw check_error("chord label out of range");
    }
    std::sort(listed.begin(), listed.end());
    if (listed != su.interior)
        throw check_error("chords must list each interior edge of the region exactly once");
    return su;
}

// stored label of an edge after fusing in the group loops of its two faces
int outside_label(const Lattice& lat, const AbelianGroup& grp, const std::vector<int>& face_k,
                  int e) {
    int val = 0;
    for (int f : {lat.edge(e).left_face, lat.edge(e).right_face}) {
        const auto& fc = lat.face(f);
        for (size_t j = 0; j < fc.edge.size(); ++j) {
            if (fc.edge[j] != e) continue;
            int k = face_k[f];
            val = grp.add(val, fc.along[j] ? k : grp.neg(k));
        }
    }
    return val;
}

}  // namespace

cplx sigma_loop_coefficient(const FusionCategory& cat, const Lattice& lat,
                            const SigmaLoopSpec& spec) {
    auto su = analyze_spec(cat, lat, spec);
    stringnet::Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());

    SparseState s = stringnet::vacuum_state(ctx, lay);
    for (int f : spec.region) s = stringnet::apply_loop(ctx, s, f, su.sigma);
    for (int f = 0; f < lat.num_faces(); ++f)
        if (!su.in_region[f] && spec.outside_k[f] != 0)
            s = stringnet::apply_loop(ctx, s, f, spec.outside_k[f]);

    auto build_key = [&](bool zero_chords) {
        Key k{};
        for (int e = 0; e < lat.num_edges(); ++e) {
            bool lin = su.in_region[lat.edge(e).left_face];
            bool rin = su.in_region[lat.edge(e).right_face];
            if (lin && rin) continue;  // chord, set below
            lay->set(k, e, (lin || rin) ? su.sigma
                                        : outside_label(lat, *su.grp, spec.outside_k, e));
        }
        for (auto [e, b] : spec.chords) lay->set(k, e, zero_chords ? 0 : b);
        return k;
    };

    Key target = build_key(false);
    if (!stringnet::config_valid(ctx, *lay, target))
        throw check_error("specified configuration violates a vertex constraint");
    cplx base = amplitude_at(s, build_key(true));
    if (std::abs(base) < 1e-14) throw check_error("reference amplitude vanished");
    return amplitude_at(s, target) / base;
}

cplx gluing_point_formula(const FusionCategory& cat, const Lattice& lat,
                          const SigmaLoopSpec& spec) {
    auto su = analyze_spec(cat, lat, spec);
    cplx out{1.0, 0.0};
    for (auto [e, b] : spec.chords) {
        int f1 = lat.edge(e).left_face, f2 = lat.edge(e).right_face;
        for (int w : {lat.edge(e).from, lat.edge(e).to}) {
            // the third face at this endpoint carries the group loop k
            int third = -1;
            for (auto [e2, out_flag] : lat.vertex_star(w))
                for (int f : {lat.edge(e2).left_face, lat.edge(e2).right_face})
                    if (f != f1 && f != f2) third = f;
            if (third < 0 || su.in_region[third])
                throw check_error("gluing point is not flanked by a group-labelled face");
            int bw = (lat.edge(e).from == w) ? b : su.grp->neg(b);
            out *= std::conj(su.grp->character(spec.outside_k[third], bw));
        }
    }
    return out;
}

cplx fmove_expand_check(const FusionCategory& cat, const Lattice& lat, const SigmaLoopSpec& spec,
                        double tol) {
    cplx measured = sigma_loop_coefficient(cat, lat, spec);
    cplx formula = gluing_point_formula(cat, lat, spec);
    if (std::abs(measured - formula) > tol)
        throw check_error("loop coefficient disagrees with the gluing-point product");
    return measured;
}

std::vector<std::vector<cplx>> dense_block(const std::shared_ptr<const Layout>& lay,
                                           const std::vector<Key>& basis, const DenseOp& op,
                                           double* leak_out) {
    const size_t n = basis.size();
    std::map<Key, size_t> index;
    for (size_t i = 0; i < n; ++i) index[basis[i]] = i;
    Mat m(n, std::vector<cplx>(n, cplx{0.0, 0.0}));
    double leak = 0.0;
    for (size_t j = 0; j < n; ++j) {
        auto col = op(make_basis_state(lay, basis[j]));
        double missed = 0.0;
        for (const auto& [k, a] : col.amp) {
            auto it = index.find(k);
            if (it == index.end())
                missed += std::norm(a);
            else
                m[it->second][j] = a;
        }
        leak = std::max(leak, std::sqrt(missed));
    }
    if (leak_out) *leak_out = leak;
    return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const size_t n = a.size();
    Mat out(n, std::vector<cplx>(n, cplx{0.0, 0.0}));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            cplx aik = a[i][k];
            if (aik == cplx{0.0, 0.0}) continue;
            for (size_t j = 0; j < n; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

Mat mat_adjoint(const Mat& a) {
    const size_t n = a.size();
    Mat out(n, std::vector<cplx>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out[i][j] = std::conj(a[j][i]);
    return out;
}

double mat_dist(const Mat& a, const Mat& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

double mat_norm(const Mat& a) {
    double m = 0.0;
    for (const auto& row : a)
        for (const auto& x : row) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace oracle
}  // namespace anyonprep
