#include "afdlu.hpp"

#include <algorithm>
#include <cmath>

namespace anyonprep {
namespace afdlu {

GaugingRound attach_round(const stringnet::Context& ctx, SparseState& s, int lv) {
    const FusionCategory& cat = *ctx.cat;
    if (lv < 1 || lv > cat.num_levels())
        throw validation_error("gauging round: no such series level");
    GaugingRound round;
    round.level = lv;
    round.group = cat.levels()[lv - 1].group;
    int n = round.group.order();
    round.reps.resize(n);
    for (int g = 0; g < n; ++g) {
        auto objs = cat.sector_objects(lv, g);
        if (objs.empty()) throw check_error("gauging round: empty grading sector");
        round.reps[g] = objs.front();
    }
    double w = 1.0 / std::sqrt(static_cast<double>(n));
    round.basis.assign(n, std::vector<cplx>(n));
    for (int chi = 0; chi < n; ++chi)
        for (int g = 0; g < n; ++g)
            round.basis[chi][g] = std::conj(round.group.character(chi, g)) * w;
    std::vector<cplx> plus(n, w);
    for (int f = 0; f < ctx.lat->num_faces(); ++f) {
        auto bigger = s.layout->with_register(Layout::Kind::FaceAncilla, f, n);
        int reg = bigger->num_registers() - 1;
        s = with_new_register(s, bigger, reg, plus);
        round.ancilla.push_back(reg);
    }
    return round;
}

SparseState controlled_Bp(const stringnet::Context& ctx, const SparseState& s,
                          const GaugingRound& round, int face, bool adjoint) {
    const Layout& lay = *s.layout;
    if (face < 0 || face >= static_cast<int>(round.ancilla.size()))
        throw check_error("controlled plaquette operator: no ancilla for this face");
    int anc = round.ancilla[face];
    if (anc < 0 || anc >= lay.num_registers() || lay.reg(anc).kind != Layout::Kind::FaceAncilla ||
        lay.reg(anc).ref != face)
        throw check_error("controlled plaquette operator: ancilla register missing");
    auto branch = [&](int g) {
        return apply_diag(
            s, [&lay, anc, g](const Key& k) { return lay.get(k, anc) == g ? cplx(1.0) : cplx(0.0); });
    };
    // branch g applies B_p^{s_g} / d_{s_g}; the identity sector passes through
    SparseState out = branch(0);
    for (int g = 1; g < round.group.order(); ++g) {
        int rep = round.reps[g];
        int lbl = adjoint ? ctx.cat->dual(rep) : rep;
        SparseState part = stringnet::apply_loop(ctx, branch(g), face, lbl);
        out = add(out, part, 1.0 / ctx.cat->dim(rep));
    }
    return out;
}

SparseState set_entangler(const stringnet::Context& ctx, const SparseState& s,
                          const GaugingRound& round) {
    SparseState out = s;
    for (int f = 0; f < ctx.lat->num_faces(); ++f) out = controlled_Bp(ctx, out, round, f);
    return out;
}

SparseState global_ancilla_shift(const SparseState& s, const GaugingRound& round, int g) {
    int n = round.group.order();
    std::vector<std::vector<cplx>> u(n, std::vector<cplx>(n, 0.0));
    for (int h = 0; h < n; ++h) u[round.group.add(g, h)][h] = 1.0;
    SparseState out = s;
    for (int reg : round.ancilla) out = rotate_register(out, reg, u);
    return out;
}

SparseState outcome_projector(const stringnet::Context& ctx, const SparseState& s, int face,
                              int lv, int chi) {
    const AbelianGroup& grp = ctx.cat->levels()[lv - 1].group;
    int n = grp.order();
    SparseState out = scaled(stringnet::apply_graded(ctx, s, face, lv, 0), 1.0 / n);
    for (int g = 1; g < n; ++g) {
        SparseState part = stringnet::apply_graded(ctx, s, face, lv, g);
        out = add(out, part, std::conj(grp.character(chi, g)) / static_cast<double>(n));
    }
    return out;
}

std::pair<SparseState, RoundRecord> finish_round(const stringnet::Context& ctx,
                                                 const SparseState& s, const GaugingRound& round,
                                                 Rng& rng) {
    const Lattice& lat = *ctx.lat;
    const AbelianGroup& grp = round.group;
    RoundRecord rec;
    rec.level = round.level;
    SparseState cur = s;
    for (int f = 0; f < lat.num_faces(); ++f) {
        int reg = round.ancilla[f];
        cur = rotate_register(cur, reg, round.basis);
        auto lay = cur.layout;
        double prob = 0.0;
        int outcome =
            measure_value(cur, [lay, reg](const Key& k) { return lay->get(k, reg); }, rng, &prob);
        rec.measurements.push_back({f, outcome, prob});
    }
    for (int f = lat.num_faces() - 1; f >= 0; --f) {
        std::vector<cplx> known(grp.order(), 0.0);
        known[rec.measurements[f].outcome] = 1.0;
        cur = contract_register(cur, round.ancilla[f], known);
    }

    // Feedforward. A character string along a dual path from p to q takes the
    // plaquette charge chi at p to chi - c and the charge at q to chi + c, so
    // stringing chi = (charge at p) moves it onto q whole.
    std::vector<std::pair<int, int>> charge;
    int total = 0;
    for (const auto& m : rec.measurements) {
        if (m.outcome == 0) continue;
        charge.push_back({m.face, m.outcome});
        total = grp.add(total, m.outcome);
    }
    if (total != 0) throw check_error("gauging round: plaquette charges do not fuse to vacuum");
    auto move_charge = [&](int from, int to, int chi) {
        auto path = lat.dual_path(from, to);
        cur = stringnet::apply_char_string(ctx, cur, round.level, chi, path);
        CorrectionRecord c{from, to, chi, {}};
        for (const auto& cr : path) c.edges.push_back(cr.edge);
        rec.corrections.push_back(std::move(c));
    };
    while (true) {
        // nearest inverse pair, first-found on distance ties
        int bi = -1, bj = -1, bd = 0;
        for (int i = 0; i < static_cast<int>(charge.size()); ++i)
            for (int j = i + 1; j < static_cast<int>(charge.size()); ++j) {
                if (charge[j].second != grp.neg(charge[i].second)) continue;
                int d = lat.dual_distance(charge[i].first, charge[j].first);
                if (bi < 0 || d < bd) {
                    bd = d;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) break;
        move_charge(charge[bi].first, charge[bj].first, charge[bi].second);
        charge.erase(charge.begin() + bj);
        charge.erase(charge.begin() + bi);
    }
    if (!charge.empty()) {
        // no inverse partners remain; collect the rest on the lowest face
        int acc = charge.front().second;
        for (size_t i = 1; i < charge.size(); ++i) {
            move_charge(charge[i].first, charge.front().first, charge[i].second);
            acc = grp.add(acc, charge[i].second);
        }
        if (acc != 0) throw check_error("gauging round: residual collector charge");
    }
    return {cur, rec};
}

std::pair<SparseState, RoundRecord> kw_round(const stringnet::Context& ctx, const SparseState& s,
                                             int lv, Rng& rng) {
    SparseState cur = s;
    GaugingRound round = attach_round(ctx, cur, lv);
    cur = set_entangler(ctx, cur, round);
    return finish_round(ctx, cur, round, rng);
}

SparseState symmetrize_sheet(const stringnet::Context& ctx, const SparseState& s, int lv) {
    if (lv < 1 || lv > ctx.cat->num_levels())
        throw validation_error("symmetrize sheet: level out of range");
    int n = ctx.cat->levels()[lv - 1].group.order();
    SparseState acc = s;
    for (int g = 1; g < n; ++g) {
        SparseState term = s;
        for (int f = 0; f < ctx.lat->num_faces(); ++f)
            term = stringnet::apply_graded(ctx, term, f, lv, g);
        acc = add(acc, term);
    }
    acc = scaled(acc, 1.0 / n);
    double nrm2 = acc.norm2();
    if (nrm2 < TOL_EIG)
        throw check_error("symmetrize sheet: state has no symmetric component");
    return acc.normalized();
}

std::pair<SparseState, ProtocolTranscript> prepare(const FusionCategory& cat, const Lattice& lat,
                                                   uint64_t seed) {
    if (cat.num_levels() < 1) throw validation_error("prepare: category has no grading series");
    cat.validate();
    stringnet::Context ctx{&cat, &lat};
    SparseState s = stringnet::vacuum_state(ctx, Layout::edges(lat, cat.num_objects()));
    Rng rng(seed);
    ProtocolTranscript t;
    t.category = cat.name();
    t.lx = lat.lx();
    t.ly = lat.ly();
    t.seed = seed;
    for (int lv = 1; lv <= cat.num_levels(); ++lv) {
        // On a torus the previous round leaves one logical state of the
        // level ground space; steer it into the sector symmetric under the
        // level's sheet so every measurement branch is correctable.
        s = symmetrize_sheet(ctx, s, lv);
        auto [next, rec] = kw_round(ctx, s, lv, rng);
        s = next.normalized();
        t.rounds.push_back(std::move(rec));
    }
    t.state_checksum = state_checksum(s);
    return {s, t};
}

std::string to_text(const ProtocolTranscript& t) {
    std::string out = "transcript v1\n";
    out += "category " + t.category + "\n";
    out += "lattice " + std::to_string(t.lx) + " " + std::to_string(t.ly) + "\n";
    out += "seed " + std::to_string(t.seed) + "\n";
    for (const auto& r : t.rounds) {
        out += "round " + std::to_string(r.level) + "\n";
        for (const auto& m : r.measurements)
            out += "  m " + std::to_string(m.face) + " " + std::to_string(m.outcome) + " " +
                   format_double(m.probability) + "\n";
        for (const auto& c : r.corrections) {
            out += "  c " + std::to_string(c.from_face) + " " + std::to_string(c.to_face) + " " +
                   std::to_string(c.chi) + " ";
            for (size_t i = 0; i < c.edges.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(c.edges[i]);
            }
            out += "\n";
        }
    }
    out += "checksum " + format_hex64(t.state_checksum) + "\n";
    return out;
}

}  // namespace afdlu
}  // namespace anyonprep
