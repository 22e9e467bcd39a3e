/*
 * Acceptance runner.  One line per criterion:
 *   PASS|FAIL <n> <title> (<seconds> s) [detail]
 * A budget of 0 means no time limit.  Exit status is nonzero when any
 * criterion fails.
 */
#include "support.hpp"

#include "kdual/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

using namespace testsup;

namespace {

struct Verdict {
        bool ok = true;
        std::string detail;

        void fail(const std::string &what)
        {
                if (ok)
                        detail = what;
                ok = false;
        }
        void expect(bool cond, const std::string &what)
        {
                if (!cond)
                        fail(what);
        }
};

int failures = 0;

void criterion(int n, const std::string &title, double budget_s, const std::function<Verdict()> &body)
{
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
                v = body();
        } catch (const std::exception &e) {
                v.fail(std::string("exception: ") + e.what());
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget_s > 0 && s > budget_s)
                v.fail("runtime " + std::to_string(s) + " s exceeds " + std::to_string(budget_s) + " s");
        std::printf("%s %d %s (%.2f s)%s%s\n", v.ok ? "PASS" : "FAIL", n, title.c_str(), s, v.detail.empty() ? "" : " : ",
                    v.detail.c_str());
        std::fflush(stdout);
        if (!v.ok)
                failures++;
}

std::string where(const std::string &name, FaceId t) { return name + " face " + std::to_string(t); }

std::vector<NamedContext> &cones_with_duals()
{
        static std::vector<NamedContext> c = test_contexts(true);
        return c;
}

std::vector<Summand> multiset(std::initializer_list<Summand> xs)
{
        std::vector<Summand> v(xs);
        std::sort(v.begin(), v.end());
        return v;
}

/* ---- 1 ---- */
Verdict table_goldens()
{
        Verdict v;
        auto ctx = make_context(ray_fan());
        const FaceId o = 0, sigma = 1;
        struct Row {
                const char *name;
                InjComplex built;
                std::vector<Summand> summands;
        };
        std::vector<Row> rows = {
                {"L_sigma", simple(ctx, sigma).complex, multiset({{sigma, {0, 0}}})},
                {"N_o_1", costandard(ctx, o, 1), multiset({{o, {-2, 0}}})},
                {"L_o_1", twist(simple(ctx, o).complex, 1), multiset({{o, {-2, 0}}, {sigma, {0, 2}}})},
                {"M_o_1", twist(standard(ctx, o), 1), multiset({{o, {-2, 0}}, {sigma, {0, 0}}, {sigma, {0, 2}}})},
                {"I_sigma", injective_hull(ctx, sigma).complex, multiset({{o, {-2, 0}}, {sigma, {0, 0}}})},
        };
        v.expect(is_isomorphic(costandard(ctx, o, 1), twist(injective_hull(ctx, o).complex, 1)).isomorphic,
                 "N_o<1> is not I_o<1>");
        for (auto &r : rows) {
                InjComplex golden =
                        complex_from_json(ctx, nlohmann::json::parse(read_text(std::string(KDUAL_SOURCE_DIR) + "/tests/golden/" + r.name + ".json")));
                InjComplex m = minimize(r.built);
                v.expect(sorted_summands(m) == r.summands, std::string(r.name) + ": summand multiset differs");
                v.expect(is_isomorphic(m, golden).isomorphic, std::string(r.name) + ": not isomorphic to golden");
        }
        return v;
}

/* ---- 2 ---- */
Verdict costandard_duality()
{
        Verdict v;
        for (auto &nc : cones_with_duals()) {
                DualityContext dc = make_duality(nc.ctx);
                for (FaceId t = 0; t < nc.ctx->fan().size(); t++) {
                        InjComplex k = kappa(dc, costandard(nc.ctx, t));
                        v.expect(is_isomorphic(k, costandard(dc.dual, dc.perp[t])).isomorphic, where(nc.name, t));
                }
        }
        return v;
}

/* ---- 3 ---- */
Verdict simples_and_injectives()
{
        Verdict v;
        for (auto &nc : cones_with_duals()) {
                DualityContext dc = make_duality(nc.ctx);
                for (FaceId t = 0; t < nc.ctx->fan().size(); t++) {
                        FaceId tp = dc.perp[t];
                        InjComplex kl = kappa(dc, simple(nc.ctx, t).complex);
                        InjComplex ki = kappa(dc, injective_hull(nc.ctx, t).complex);
                        v.expect(is_isomorphic(kl, injective_hull(dc.dual, tp).complex).isomorphic, "kappa(L) " + where(nc.name, t));
                        v.expect(is_isomorphic(ki, simple(dc.dual, tp).complex).isomorphic, "kappa(I) " + where(nc.name, t));
                }
        }
        return v;
}

/* ---- 4 ---- */
std::map<std::string, std::vector<KoszulEntry>> ext_tables;

Verdict koszulity()
{
        Verdict v;
        for (auto &nc : cones_with_duals()) {
                auto table = koszul_table(nc.ctx);
                for (auto &e : table)
                        for (auto &[ab, dim] : e.dims)
                                if (dim && ab.u != ab.v)
                                        v.fail(nc.name + ": Hom^" + std::to_string(ab.u) + "_" + std::to_string(ab.v) + " nonzero");
                ext_tables[nc.name] = std::move(table);
        }
        auto ray = make_context(ray_fan());
        InjComplex lo = simple(ray, 0).complex;
        std::size_t h = hom_dim(lo, lo, {2, 2});
        v.expect(h == 1, "Hom^1_1(L_o, L_o) on the ray is " + std::to_string(h));
        return v;
}

/* ---- 5 ---- */
Verdict ext_ring()
{
        Verdict v;
        for (auto &nc : cones_with_duals()) {
                DualityContext dc = make_duality(nc.ctx);
                const Fan &f = nc.ctx->fan();
                std::vector<InjComplex> inj(f.size());
                for (FaceId t = 0; t < f.size(); t++)
                        inj[t] = injective_hull(dc.dual, dc.perp[t]).complex;
                auto it = ext_tables.find(nc.name);
                auto table = it != ext_tables.end() ? it->second : koszul_table(nc.ctx);
                int range = 2 * static_cast<int>(nc.ctx->n()) + 2;
                for (auto &e : table) {
                        std::map<int, std::size_t> ext, end;
                        for (auto &[ab, dim] : e.dims)
                                if (ab.u == ab.v && dim)
                                        ext[ab.u] = dim;
                        for (int k = -range; k <= range; k++) {
                                /* a degree-k Ext class L_tau -> L_rho becomes a map I_rho' -> I_tau'<k> */
                                std::size_t d = hom_dim(inj[e.rho], twist(inj[e.tau], k), {0, 0});
                                if (d)
                                        end[k] = d;
                        }
                        for (auto &[k, d] : ext)
                                v.expect(std::abs(k) <= range, nc.name + ": Ext degree outside the scanned range");
                        v.expect(ext == end, nc.name + " pair (" + std::to_string(e.tau) + "," + std::to_string(e.rho) + ")");
                }
        }
        return v;
}

/* ---- 6 ---- */
Verdict purity()
{
        Verdict v;
        auto contexts = cones_with_duals();
        contexts.push_back({"hexagon", make_context(mgon_cone(6))});
        for (auto &nc : contexts) {
                const Fan &f = nc.ctx->fan();
                for (FaceId t = 0; t < f.size(); t++) {
                        InjComplex l = simple(nc.ctx, t).complex;
                        for (FaceId s = 0; s < f.size(); s++) {
                                v.expect(is_diagonal(gamma_stalk(l, s)), "stalk " + where(nc.name, t) + " at " + std::to_string(s));
                                v.expect(is_diagonal(gamma_costalk(l, s)), "costalk " + where(nc.name, t) + " at " + std::to_string(s));
                        }
                }
        }
        return v;
}

/* ---- 7 ---- */
Verdict oracle_equivalence()
{
        Verdict v;
        auto contexts = cones_with_duals();
        contexts.push_back({"hexagon", make_context(mgon_cone(6))});
        for (auto &nc : contexts)
                for (FaceId t = 0; t < nc.ctx->fan().size(); t++)
                        v.expect(crosscheck_purity(nc.ctx, t).passed(), "crosscheck " + where(nc.name, t));

        auto sq = make_context(square_cone_fan());
        const Fan &f = sq->fan();
        BigradedDims st = gamma_stalk(simple(sq, 0).complex, f.top());
        std::vector<long long> dims;
        for (auto &[deg, k] : st)
                if (k)
                        dims.push_back(static_cast<long long>(k));
        v.expect(dims == std::vector<long long>{1, 1}, "square stalk dims of L_o at the top are not (1,1)");
        v.expect(g_interval(f, 0, f.top()) == std::vector<long long>{1, 1}, "g(square) is not (1,1)");
        for (int m = 3; m <= 8; m++)
                v.expect(g_oracle(mgon_cone(m)) == std::vector<long long>{1, m - 3}, "g of the " + std::to_string(m) + "-gon");
        return v;
}

/* ---- 8 ---- */
Verdict robustness()
{
        Verdict v;
        Rng rng(2024);
        for (auto &nc : cones_with_duals()) {
                const Fan &f = nc.ctx->fan();
                for (FaceId t = 0; t < f.size(); t++) {
                        InjComplex l = simple(nc.ctx, t, Truncation::tau).complex;
                        InjComplex i = injective_hull(nc.ctx, t).complex;
                        v.expect(is_isomorphic(l, simple(nc.ctx, t, Truncation::tau_prime).complex).isomorphic,
                                 "tau vs tau' " + where(nc.name, t));
                        for (int rep = 0; rep < 3; rep++) {
                                unsigned seed = static_cast<unsigned>(rng.range(1, 1 << 24));
                                BuildOptions so, io;
                                so.order = random_linear_extension(f, default_simple_order(f, t), true, seed);
                                so.perturb_seed = seed;
                                io.order = random_linear_extension(f, default_injective_order(f, t), false, seed ^ 0x5a5a);
                                io.perturb_seed = seed ^ 0x5a5a;
                                Truncation tr = rep % 2 ? Truncation::tau_prime : Truncation::tau;
                                v.expect(is_isomorphic(simple(nc.ctx, t, tr, so).complex, l).isomorphic, "reordered simple " + where(nc.name, t));
                                v.expect(is_isomorphic(injective_hull(nc.ctx, t, io).complex, i).isomorphic,
                                         "reordered injective " + where(nc.name, t));
                                std::vector<std::size_t> perm(l.size());
                                std::iota(perm.begin(), perm.end(), 0);
                                std::shuffle(perm.begin(), perm.end(), rng.engine());
                                v.expect(is_isomorphic(permute_summands(l, perm), l).isomorphic, "permuted " + where(nc.name, t));
                        }
                }
        }
        return v;
}

/* ---- 9 ---- */
Verdict category_axioms()
{
        Verdict v;
        std::size_t total = 0;
        std::ostringstream counts;
        for (const PropertyOutcome &p : {prop_d_squared(200, 901), prop_compose_associativity(200, 902), prop_wedge_pairing(200, 903),
                                         prop_shift_group(200, 904), prop_open_closed_vanishing(200, 905),
                                         prop_closed_roundtrip(200, 906)}) {
                total += p.cases;
                counts << " " << p.name << "=" << p.cases;
                v.expect(p.ok(), p.name + ": " + std::to_string(p.failures) + " failures, first " + p.detail);
        }
        v.expect(total >= 1000, "only " + std::to_string(total) + " cases");
        if (v.ok)
                v.detail = std::to_string(total) + " cases:" + counts.str();
        return v;
}

} // namespace

int main()
{
        criterion(1, "ray fan golden objects", 1.0, table_goldens);
        criterion(2, "costandard duality kappa(N_tau) = N_tau_perp", 10.0, costandard_duality);
        criterion(3, "kappa(L) = I and kappa(I) = L", 300.0, simples_and_injectives);
        criterion(4, "Koszulity and Hom^1_1(L_o, L_o) = 1 on the ray", 0, koszulity);
        criterion(5, "End/Ext ring identity", 0, ext_ring);
        criterion(6, "pointwise purity of simple objects", 0, purity);
        criterion(7, "minimal extension sheaf oracle and g-vectors", 0, oracle_equivalence);
        criterion(8, "truncation variants, reorderings and permutations", 0, robustness);
        criterion(9, "category axioms over random data", 0, category_axioms);
        std::printf("%d of 9 criteria failed\n", failures);
        return failures ? 1 : 0;
}
