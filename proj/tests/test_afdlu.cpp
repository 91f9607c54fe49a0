#include <doctest.h>

#include <cmath>
#include <complex>

#include "afdlu.hpp"
#include "oracle.hpp"

using namespace anyonprep;
using namespace anyonprep::stringnet;
using namespace anyonprep::oracle;
namespace afd = anyonprep::afdlu;

namespace {

double diff_norm(const SparseState& a, const SparseState& b) {
    return std::sqrt(add(a, b, cplx{-1.0, 0.0}).norm2());
}

// Ground state of one series level: every plaquette projected onto the
// trivial level-lv charge.
SparseState level_ground(const Context& ctx, std::shared_ptr<const Layout> lay, int lv) {
    SparseState s = vacuum_state(ctx, lay);
    for (int f = 0; f < ctx.lat->num_faces(); ++f) s = afd::outcome_projector(ctx, s, f, lv, 0);
    return s.normalized();
}

bool same_record(const afd::RoundRecord& a, const afd::RoundRecord& b) {
    if (a.level != b.level || a.measurements.size() != b.measurements.size() ||
        a.corrections.size() != b.corrections.size())
        return false;
    for (size_t i = 0; i < a.measurements.size(); ++i) {
        const auto &ma = a.measurements[i], &mb = b.measurements[i];
        if (ma.face != mb.face || ma.outcome != mb.outcome || ma.probability != mb.probability)
            return false;
    }
    for (size_t i = 0; i < a.corrections.size(); ++i) {
        const auto &ca = a.corrections[i], &cb = b.corrections[i];
        if (ca.from_face != cb.from_face || ca.to_face != cb.to_face || ca.chi != cb.chi ||
            ca.edges != cb.edges)
            return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("afdlu") {

TEST_CASE("controlled plaquette operator branches") {
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());
    auto s1 = level_ground(ctx, lay, 1);

    SparseState se = s1;
    auto round = afd::attach_round(ctx, se, 2);
    REQUIRE(round.ancilla.size() == 4);
    CHECK(round.reps[0] == 0);
    CHECK(round.reps[1] == 2);  // sigma represents the nontrivial sector

    // the ancilla register must exist
    CHECK_THROWS_AS(afd::controlled_Bp(ctx, s1, round, 0), check_error);
    CHECK_THROWS_AS(afd::attach_round(ctx, se, 5), validation_error);

    const Layout& elay = *se.layout;
    int anc = round.ancilla[0];
    auto pick = [&](int g) {
        return apply_diag(se, [&elay, anc, g](const Key& k) {
            return elay.get(k, anc) == g ? cplx(1.0) : cplx(0.0);
        });
    };

    // identity branch passes through, sigma branch applies the graded part
    auto b0 = pick(0);
    CHECK(diff_norm(afd::controlled_Bp(ctx, b0, round, 0), b0) < TOL_ALGEBRA);
    auto b1 = pick(1);
    auto got = afd::controlled_Bp(ctx, b1, round, 0);
    auto want = apply_graded(ctx, b1, 0, 2, 1);
    CHECK(diff_norm(got, want) < TOL_ALGEBRA);

    // adjoint composition collapses to the level-1 flux projector per branch
    auto caty = FusionCategory::ty_z3();
    Context cty{&caty, &lat};
    auto s1ty = level_ground(cty, Layout::edges(lat, caty.num_objects()), 1);
    SparseState sty = s1ty;
    auto rty = afd::attach_round(cty, sty, 2);
    auto back = afd::controlled_Bp(cty, afd::controlled_Bp(cty, sty, rty, 0), rty, 0, true);
    CHECK(diff_norm(back, sty) < TOL_ALGEBRA);

    // outside the string-net sector the sigma branch keeps the projector
    auto vacty = vacuum_state(cty, Layout::edges(lat, caty.num_objects()));
    SparseState vt = vacty;
    auto rvt = afd::attach_round(cty, vt, 2);
    const Layout& vlay = *vt.layout;
    int vanc = rvt.ancilla[0];
    auto off = apply_diag(vt, [&vlay, vanc](const Key& k) {
        return vlay.get(k, vanc) == 1 ? cplx(1.0) : cplx(0.0);
    });
    auto lhs = afd::controlled_Bp(cty, afd::controlled_Bp(cty, off, rvt, 0), rvt, 0, true);
    auto rhs = afd::outcome_projector(cty, off, 0, 1, 0);
    CHECK(diff_norm(lhs, rhs) < TOL_ALGEBRA);
}

TEST_CASE("kramers wannier round prepares the toric code") {
    auto cat = FusionCategory::vec_zn(2);
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());
    auto vac = vacuum_state(ctx, lay);
    auto gs = ground_state(ctx, lay);

    bool saw_clean = false, saw_corrected = false;
    for (uint64_t seed = 0; seed < 24; ++seed) {
        Rng rng(seed);
        auto [out, rec] = afd::kw_round(ctx, vac, 1, rng);
        out = out.normalized();
        CHECK(std::abs(fidelity(out, gs) - 1.0) < TOL_EIG);
        CHECK(state_valid(ctx, out));
        REQUIRE(rec.measurements.size() == 4);
        int nontrivial = 0;
        for (int f = 0; f < 4; ++f) {
            CHECK(rec.measurements[f].face == f);
            if (rec.measurements[f].outcome != 0) ++nontrivial;
        }
        // three free coin flips, then the total charge forces the last outcome
        for (int f = 0; f < 3; ++f)
            CHECK(std::abs(rec.measurements[f].probability - 0.5) < TOL_ALGEBRA);
        CHECK(std::abs(rec.measurements[3].probability - 1.0) < TOL_ALGEBRA);
        CHECK(nontrivial % 2 == 0);
        CHECK(rec.corrections.size() == static_cast<size_t>(nontrivial / 2));
        for (int f = 0; f < 4; ++f)
            CHECK(std::abs(flux_expectation(ctx, out, f) - 1.0) < TOL_EIG);
        if (rec.corrections.empty()) saw_clean = true;
        if (!rec.corrections.empty()) saw_corrected = true;
    }
    CHECK(saw_clean);
    CHECK(saw_corrected);
}

TEST_CASE("syndrome routing over z3") {
    auto cat = FusionCategory::vec_zn(3);
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());
    auto vac = vacuum_state(ctx, lay);
    auto gs = ground_state(ctx, lay);

    bool saw_collector = false;
    SparseState first;
    for (uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        auto [out, rec] = afd::kw_round(ctx, vac, 1, rng);
        out = out.normalized();
        CHECK(std::abs(fidelity(out, gs) - 1.0) < TOL_EIG);
        if (seed == 0)
            first = out;
        else
            CHECK(std::abs(fidelity(out, first) - 1.0) < TOL_EIG);
        int c1 = 0, c2 = 0;
        for (const auto& m : rec.measurements) {
            if (m.outcome == 1) ++c1;
            if (m.outcome == 2) ++c2;
        }
        if (c1 != c2) saw_collector = true;  // some charge had no inverse partner
    }
    CHECK(saw_collector);
}

TEST_CASE("set entangler carries the global symmetry") {
    auto lat = Lattice::honeycomb_torus(2, 2);

    // doubled Ising, second round. On the torus the bare z2 ground state is
    // one logical state; the sheet-symmetrized state is the one the global
    // shift leaves invariant (on the bare state the shift is a logical op).
    auto cat = FusionCategory::ising();
    Context ctx{&cat, &lat};
    auto s1 = level_ground(ctx, Layout::edges(lat, cat.num_objects()), 1);
    auto s1sym = afd::symmetrize_sheet(ctx, s1, 2);
    CHECK(std::abs(fidelity(s1sym, s1) - std::sqrt(0.75)) < 1e-6);
    SparseState se = s1sym;
    auto round = afd::attach_round(ctx, se, 2);
    auto ent = afd::set_entangler(ctx, se, round);
    CHECK(state_valid(ctx, ent));
    for (int g = 0; g < 2; ++g)
        CHECK(std::abs(fidelity(afd::global_ancilla_shift(ent, round, g), ent) - 1.0) < TOL_EIG);

    // on the unsymmetrized input the shifted entangler overlaps at 1/2
    SparseState sb = s1;
    auto roundb = afd::attach_round(ctx, sb, 2);
    auto entb = afd::set_entangler(ctx, sb, roundb);
    CHECK(std::abs(fidelity(afd::global_ancilla_shift(entb, roundb, 1), entb) - 0.5) < 1e-6);

    // z3 gauge theory, first round
    auto cat3 = FusionCategory::vec_zn(3);
    Context ctx3{&cat3, &lat};
    auto vac3 = vacuum_state(ctx3, Layout::edges(lat, cat3.num_objects()));
    SparseState se3 = vac3;
    auto round3 = afd::attach_round(ctx3, se3, 1);
    auto ent3 = afd::set_entangler(ctx3, se3, round3);
    for (int g = 0; g < 3; ++g)
        CHECK(std::abs(fidelity(afd::global_ancilla_shift(ent3, round3, g), ent3) - 1.0) < TOL_EIG);

    // entangle + measure composes to the full round
    Rng ra(5), rb(5);
    auto [manual, mrec] = afd::finish_round(ctx3, ent3, round3, ra);
    auto [direct, drec] = afd::kw_round(ctx3, vac3, 1, rb);
    CHECK(diff_norm(manual, direct) < TOL_ALGEBRA);
    CHECK(same_record(mrec, drec));
}

TEST_CASE("level projectors hold after each round") {
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto vac = vacuum_state(ctx, Layout::edges(lat, cat.num_objects()));
    Rng rng(2);
    auto [s1, rec1] = afd::kw_round(ctx, vac, 1, rng);
    s1 = s1.normalized();
    CHECK(state_valid(ctx, s1));
    for (int f = 0; f < lat.num_faces(); ++f) {
        auto p = afd::outcome_projector(ctx, s1, f, 1, 0);
        CHECK(std::abs(inner(s1, p).real() - 1.0) < TOL_EIG);
    }
    auto [s2, rec2] = afd::kw_round(ctx, afd::symmetrize_sheet(ctx, s1, 2), 2, rng);
    s2 = s2.normalized();
    for (int f = 0; f < lat.num_faces(); ++f)
        CHECK(std::abs(flux_expectation(ctx, s2, f) - 1.0) < TOL_EIG);
}

TEST_CASE("prepared states match the reference ground states") {
    auto lat = Lattice::honeycomb_torus(2, 2);

    struct Job {
        FusionCategory cat;
        uint64_t seed;
    };
    for (const auto& job : {Job{FusionCategory::ising(), 7}, Job{FusionCategory::ty_z3(), 3},
                            Job{FusionCategory::vec_zn(3), 1}}) {
        Context ctx{&job.cat, &lat};
        auto [s, t] = afd::prepare(job.cat, lat, job.seed);
        auto gs = ground_state(ctx, Layout::edges(lat, job.cat.num_objects()));
        CHECK(std::abs(fidelity(s, gs) - 1.0) < TOL_FID);
        CHECK(state_valid(ctx, s));
        CHECK(t.rounds.size() == static_cast<size_t>(job.cat.num_levels()));
        CHECK(t.state_checksum != 0);
        for (int f = 0; f < lat.num_faces(); ++f) {
            CHECK(std::abs(flux_expectation(ctx, s, f) - 1.0) < TOL_EIG);
            CHECK(diff_norm(apply_flux(ctx, s, f), s) < TOL_EIG);
        }
    }

    // the z3 state is the uniform superposition of closed-string patterns
    auto cat3 = FusionCategory::vec_zn(3);
    auto [s3, t3] = afd::prepare(cat3, lat, 1);
    REQUIRE(s3.amp.size() == 27);
    for (const auto& [k, a] : s3.amp) CHECK(std::abs(std::abs(a) - 1.0 / std::sqrt(27.0)) < TOL_ALGEBRA);

    CHECK_THROWS_AS(afd::prepare(FusionCategory(), lat, 0), validation_error);
}

TEST_CASE("second round outcome projectors") {
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());

    std::vector<int> all_v(lat.num_vertices());
    for (int v = 0; v < lat.num_vertices(); ++v) all_v[v] = v;
    std::vector<char> on_face(lat.num_edges(), 0);
    for (int e : lat.face(0).edge) on_face[e] = 1;
    auto basis = enumerate_configs(ctx, lay, all_v, [&](const Key& k) {
        for (int e = 0; e < lat.num_edges(); ++e)
            if (!on_face[e] && lay->get(k, e) != 0) return false;
        return true;
    });
    REQUIRE(basis.size() == 3);

    auto block = [&](auto&& op) { return dense_block(lay, basis, op); };
    auto p0 = block([&](const SparseState& s) { return afd::outcome_projector(ctx, s, 0, 2, 0); });
    auto p1 = block([&](const SparseState& s) { return afd::outcome_projector(ctx, s, 0, 2, 1); });
    auto bpsi = block([&](const SparseState& s) { return apply_loop(ctx, s, 0, 1); });
    auto bsig = block([&](const SparseState& s) { return apply_loop(ctx, s, 0, 2); });

    double r2 = std::sqrt(2.0);
    Mat m0 = bpsi, m1 = bpsi;
    for (size_t i = 0; i < m0.size(); ++i) {
        m0[i][i] += 1.0;
        m1[i][i] += 1.0;
        for (size_t j = 0; j < m0.size(); ++j) {
            m0[i][j] = (m0[i][j] + r2 * bsig[i][j]) * 0.25;
            m1[i][j] = (m1[i][j] - r2 * bsig[i][j]) * 0.25;
        }
    }
    CHECK(mat_dist(p0, m0) < TOL_ALGEBRA);
    CHECK(mat_dist(p1, m1) < TOL_ALGEBRA);
    CHECK(mat_dist(mat_mul(p0, p0), p0) < TOL_ALGEBRA);
    CHECK(mat_dist(mat_mul(p1, p1), p1) < TOL_ALGEBRA);
    CHECK(mat_dist(mat_adjoint(p0), p0) < TOL_ALGEBRA);
    CHECK(mat_dist(mat_adjoint(p1), p1) < TOL_ALGEBRA);
    CHECK(mat_norm(mat_mul(p0, p1)) < TOL_ALGEBRA);

    // the single-representative branches agree with them on the round-1 sector
    auto s1 = level_ground(ctx, lay, 1);
    for (int chi = 0; chi < 2; ++chi) {
        double sign = chi == 0 ? 1.0 : -1.0;
        auto kraus = add(s1, apply_loop(ctx, s1, 0, 2), sign / r2);
        kraus = scaled(kraus, 0.5);
        CHECK(diff_norm(kraus, afd::outcome_projector(ctx, s1, 0, 2, chi)) < TOL_EIG);
    }
}

TEST_CASE("born statistics of the second round") {
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    int trivial = 0;
    const int runs = 1000;
    for (uint64_t seed = 0; seed < runs; ++seed) {
        auto [s, t] = afd::prepare(cat, lat, seed);
        REQUIRE(t.rounds.size() == 2);
        if (t.rounds[1].measurements[0].outcome == 0) ++trivial;
    }
    // p = 1/2 each; allow three standard deviations around 500
    CHECK(trivial >= 453);
    CHECK(trivial <= 547);
}

TEST_CASE("asymmetric round input is rejected") {
    // Fed the bare z2 ground state instead of the sheet-symmetrized one, the
    // second round measures an uncancellable total charge on a quarter of the
    // branches and must refuse; the remaining branches still reach the target.
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    Context ctx{&cat, &lat};
    auto lay = Layout::edges(lat, cat.num_objects());
    auto s1 = level_ground(ctx, lay, 1);
    auto gs = ground_state(ctx, lay);
    int rejected = 0, reached = 0;
    const int runs = 60;
    for (uint64_t seed = 0; seed < runs; ++seed) {
        Rng rng(seed);
        try {
            auto [s2, rec] = afd::kw_round(ctx, s1, 2, rng);
            s2 = s2.normalized();
            CHECK(std::abs(fidelity(s2, gs) - 1.0) < TOL_FID);
            ++reached;
        } catch (const check_error& e) {
            CHECK(std::string(e.what()).find("fuse to vacuum") != std::string::npos);
            ++rejected;
        }
    }
    CHECK(reached + rejected == runs);
    // binomial(60, 1/4): three sigma is about ten
    CHECK(rejected >= 5);
    CHECK(rejected <= 26);
}

TEST_CASE("transcripts are byte stable") {
    auto cat = FusionCategory::ising();
    auto lat = Lattice::honeycomb_torus(2, 2);
    auto [s1, t1] = afd::prepare(cat, lat, 11);
    auto [s2, t2] = afd::prepare(cat, lat, 11);
    auto text1 = afd::to_text(t1), text2 = afd::to_text(t2);
    CHECK(text1 == text2);
    CHECK(text1.find("seed 11\n") != std::string::npos);
    CHECK(text1.find("category ising\n") != std::string::npos);

    int old = threads();
    set_threads(4);
    auto [s3, t3] = afd::prepare(cat, lat, 11);
    set_threads(old);
    CHECK(afd::to_text(t3) == text1);
    CHECK(diff_norm(s3, s1) == 0.0);
}

}  // TEST_SUITE
