#pragma once

#include "stringnet.hpp"

namespace anyonprep {
namespace oneform {

// Outcome record of ungauging a region. The Gauss measurement on every
// interior edge yields a group element; for a 1-form symmetric state the
// pattern is the coboundary of a vertex potential, which is solved on the
// region's spanning tree and cancelled by a matter shift byproduct.
struct UngaugeOutcome {
    std::vector<int> edges;         // interior edges, measurement order
    std::vector<int> edge_outcome;  // g_e per entry of edges
    std::vector<int> vertices;      // inner vertices, ancilla order
    std::vector<int> potential;     // g_v per entry of vertices (root anchored at 0)
    std::vector<int> byproduct;     // vertices that received a nonzero shift
};

// Condense the vertex charges on a region: attach a |+> matter register over
// every inner vertex, then measure the Gauss projector family on each
// interior edge (edge-index order). The Gauss generator on edge e couples a
// clock at the tail, the inverse clock at the head, and a unit shift of the
// edge label, so the measured value reads the edge's Fourier label relative
// to the matter difference. The byproduct shift maps every branch onto the
// same canonical condensed state, so the result is seed independent.
//
// Requires a vec-type category (all quantum dimensions 1) whose object labels
// realize grp, and a connected disk region. A state that is not 1-form
// symmetric on the region (nontrivial flux on a deep face) produces outcomes
// with nontrivial holonomy and raises the protocol-violation error.
std::pair<SparseState, UngaugeOutcome> ungauge_region(const stringnet::Context& ctx,
                                                      const SparseState& s,
                                                      const Lattice::Region& region,
                                                      const AbelianGroup& grp, Rng& rng);

// Undo the condensation: measure every matter register in the character
// basis (vertex order), verify the charges fuse to vacuum, push them to the
// tree root with edge shift strings (the 1-form symmetry operators), and
// retire the matter registers. Left multiplication is used throughout; for
// an Abelian group the right-multiplication variant differs only by
// relabeling the measured characters. Returns the original edge state for
// any input symmetric under the uniform matter shift.
SparseState regauge_region(const stringnet::Context& ctx, const SparseState& s,
                           const Lattice::Region& region, const AbelianGroup& grp, Rng& rng,
                           std::vector<int>* charges_out = nullptr);

// Uniform matter shift by g over the region's attached vertex registers: the
// residual global symmetry of the condensed window.
SparseState matter_shift(const SparseState& s, const Lattice::Region& region,
                         const AbelianGroup& grp, int g);

using WindowOp = std::function<SparseState(const stringnet::Context&, const SparseState&)>;

// Ungauge the region, apply op inside the condensed window, regauge. Before
// op is applied both orderings of op and every uniform matter shift are
// compared on the dense block of configurations spanned by the window state;
// an op that fails to commute is rejected. Symmetric ops commute through the
// round trip onto their gauged counterparts acting on the original state.
SparseState apply_symmetric_in_window(const stringnet::Context& ctx, const SparseState& s,
                                      const Lattice::Region& region, const AbelianGroup& grp,
                                      const WindowOp& op, Rng& rng);

// Append an ungauge/regauge record to transcript text in the afdlu line
// format: one "window" header, then per-edge and per-vertex outcome lines.
std::string window_to_text(const UngaugeOutcome& out, const std::vector<int>& vertex_charges);

}  // namespace oneform
}  // namespace anyonprep
