#pragma once

#include <functional>
#include <map>
#include <vector>

#include "stringnet.hpp"

namespace anyonprep {
namespace oracle {

// Hard ceiling on brute-force enumerations; larger requests throw
// resource_error instead of silently degrading.
constexpr long CONFIG_GUARD = 531441;  // 3^12

// All configurations satisfying the vertex constraint at the listed vertices
// (every vertex by default), optionally filtered, in a fixed deterministic
// order. The search assigns edges in an adjacency order so partial
// configurations prune early.
std::vector<Key> enumerate_configs(const stringnet::Context& ctx,
                                   const std::shared_ptr<const Layout>& lay,
                                   const std::vector<int>& enforce_vertices,
                                   const std::function<bool(const Key&)>& filter = {},
                                   long guard = CONFIG_GUARD);
std::vector<Key> enumerate_valid(const stringnet::Context& ctx,
                                 const std::shared_ptr<const Layout>& lay,
                                 long guard = CONFIG_GUARD);

// Trace of prod_v A_v prod_p B_p over the edge Hilbert space: the vertex
// projectors restrict the sum to valid configurations, each contributing the
// diagonal element of the flux-projector product. Equals the rank, i.e. the
// number of anyon types of the emergent order. Parallelizes over
// configurations with a fixed-order reduction.
double ground_space_dim(const FusionCategory& cat, const Lattice& lat, bool parallel = true);

// One term of the expansion prod_p (sum_s d_s B_p^s) |0>: the faces in
// `region` take the non-invertible loop, every other face takes the group
// label in `outside_k` (indexed by face). `chords` fixes the stored group
// label of each edge interior to the region, where the two loop halves fused.
struct SigmaLoopSpec {
    std::vector<int> region;
    std::vector<int> outside_k;                 // size num_faces; entries in the group
    std::vector<std::pair<int, int>> chords;    // (edge, stored label)
};

// Amplitude of the specified configuration relative to the all-zero-chord
// one, measured by composing single-plaquette loop operators.
cplx sigma_loop_coefficient(const FusionCategory& cat, const Lattice& lat,
                            const SigmaLoopSpec& spec);

// The same coefficient predicted by the gluing-point product: each chord
// endpoint v contributes omega^{-k b}, with k the loop label of the third
// face at v and b the chord label read pointing away from v.
cplx gluing_point_formula(const FusionCategory& cat, const Lattice& lat,
                          const SigmaLoopSpec& spec);

// Computes both and throws check_error when they disagree beyond tol;
// returns the measured coefficient.
cplx fmove_expand_check(const FusionCategory& cat, const Lattice& lat, const SigmaLoopSpec& spec,
                        double tol = 1e-10);

// Materialize an operator as a dense matrix over the given basis
// configurations: M[i][j] = <c_i| op |c_j>. Off-basis image components are
// reported through *leak_out (max norm leaving the span) when requested.
using DenseOp = std::function<SparseState(const SparseState&)>;
std::vector<std::vector<cplx>> dense_block(const std::shared_ptr<const Layout>& lay,
                                           const std::vector<Key>& basis, const DenseOp& op,
                                           double* leak_out = nullptr);

// Dense-matrix helpers for projector and representation checks.
using Mat = std::vector<std::vector<cplx>>;
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_adjoint(const Mat& a);
double mat_dist(const Mat& a, const Mat& b);
double mat_norm(const Mat& a);

}  // namespace oracle
}  // namespace anyonprep
