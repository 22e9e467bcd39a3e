#include "kdual/perverse.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace kdual {

InjComplex costandard(const ContextPtr &ctx, FaceId tau, int k)
{
        InjComplex s = InjComplex::empty(ctx);
        int c = static_cast<int>(ctx->fan().codim(tau));
        s.add_summand(tau, {-c, -c});
        return k ? twist(s, k) : s;
}

int incidence(const Fan &fan, FaceId rho, FaceId rho_up)
{
        const Cone &lo = fan.face(rho), &hi = fan.face(rho_up);
        std::size_t v = SIZE_MAX;
        for (auto r : hi.rays)
                if (!std::binary_search(lo.rays.begin(), lo.rays.end(), r)) {
                        v = r;
                        break;
                }
        if (v == SIZE_MAX || hi.dim != lo.dim + 1)
                throw DcatError("InconsistentDifferential", "not a facet pair");
        std::size_t n = fan.ambient_dim(), d = hi.dim;
        QMatrix bt = hi.span_basis.transpose(); /* n x d */
        QMatrix coords(d, d);
        auto put = [&](std::size_t col, const QVector &w) {
                auto c = solve(bt, w);
                if (!c)
                        throw DcatError("InconsistentDifferential", "vector outside the span");
                for (std::size_t r = 0; r < d; r++)
                        coords(r, col) = (*c)[r];
        };
        put(0, fan.rays()[v]);
        for (std::size_t i = 0; i < lo.dim; i++)
                put(i + 1, lo.span_basis.row(i));
        (void)n;
        return sgn(determinant(coords)) > 0 ? 1 : -1;
}

InjComplex standard(const ContextPtr &ctx, FaceId tau)
{
        const Fan &fan = ctx->fan();
        InjComplex s = InjComplex::empty(ctx);
        int c = static_cast<int>(fan.codim(tau));
        std::size_t dt = fan.face(tau).dim;
        /* first[rho] = index of the summand for the empty monomial of rho */
        std::vector<std::size_t> first(fan.size(), SIZE_MAX);
        std::vector<std::vector<std::size_t>> deg_start(fan.size());
        for (FaceId rho = 0; rho < fan.size(); rho++) {
                if (!fan.leq(tau, rho))
                        continue;
                std::size_t d = ctx->rel_dim(tau, rho);
                first[rho] = s.size();
                for (std::size_t k = 0; k <= d; k++) {
                        deg_start[rho].push_back(s.size());
                        for (std::size_t m = 0; m < binomial(d, k); m++)
                                s.add_summand(rho, {-c + 2 * static_cast<int>(fan.face(rho).dim - dt), -c + 2 * static_cast<int>(k)});
                }
        }
        for (FaceId rho = 0; rho < fan.size(); rho++) {
                if (first[rho] == SIZE_MAX)
                        continue;
                std::size_t d = ctx->rel_dim(tau, rho);
                for (FaceId up = 0; up < fan.size(); up++) {
                        if (first[up] == SIZE_MAX || fan.face(up).dim != fan.face(rho).dim + 1 || !fan.leq(rho, up))
                                continue;
                        int sign = incidence(fan, rho, up);
                        std::size_t dup = ctx->rel_dim(tau, up);
                        for (std::size_t k = 0; k <= d; k++)
                                for (std::size_t p = 0; p <= 1 && k + p <= dup; p++) {
                                        /* x ^ m for x in Lambda^p(Phi^rho_up), m in Lambda^k(Phi^tau_rho) */
                                        const QMatrix &w = ctx->wedge_matrix(tau, rho, up, p, k);
                                        std::size_t nx = binomial(1, p), nm = binomial(d, k);
                                        for (std::size_t im = 0; im < nm; im++)
                                                for (std::size_t out = 0; out < w.rows(); out++) {
                                                        QVector f(nx);
                                                        for (std::size_t ix = 0; ix < nx; ix++)
                                                                f[ix] = w(out, ix * nm + im) * sign;
                                                        s.set_entry(deg_start[rho][k] + im, deg_start[up][k + p] + out, f);
                                                }
                                }
                }
        }
        validate(s);
        return s;
}

std::vector<FaceId> default_simple_order(const Fan &fan, FaceId tau)
{
        std::vector<FaceId> out;
        for (FaceId f = 0; f < fan.size(); f++)
                if (f != tau && fan.leq(tau, f))
                        out.push_back(f);
        std::stable_sort(out.begin(), out.end(), [&](FaceId a, FaceId b) { return fan.face(a).dim < fan.face(b).dim; });
        return out;
}

std::vector<FaceId> default_injective_order(const Fan &fan, FaceId tau)
{
        std::vector<FaceId> out;
        for (FaceId f = 0; f < fan.size(); f++)
                if (f != tau && fan.leq(f, tau))
                        out.push_back(f);
        std::stable_sort(out.begin(), out.end(), [&](FaceId a, FaceId b) { return fan.face(a).dim > fan.face(b).dim; });
        return out;
}

std::vector<FaceId> random_linear_extension(const Fan &fan, std::vector<FaceId> cones, bool increasing, unsigned seed)
{
        std::mt19937 rng(seed);
        std::vector<FaceId> out;
        while (!cones.empty()) {
                std::vector<std::size_t> ready;
                for (std::size_t i = 0; i < cones.size(); i++) {
                        bool ok = true;
                        for (std::size_t j = 0; j < cones.size(); j++) {
                                if (i == j)
                                        continue;
                                bool before = increasing ? fan.leq(cones[j], cones[i]) : fan.leq(cones[i], cones[j]);
                                if (before)
                                        ok = false;
                        }
                        if (ok)
                                ready.push_back(i);
                }
                std::size_t pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
                out.push_back(cones[pick]);
                cones.erase(cones.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        return out;
}

InjComplex permute_summands(const InjComplex &s, const std::vector<std::size_t> &perm)
{
        std::vector<Summand> sm(s.size());
        for (std::size_t i = 0; i < s.size(); i++)
                sm[perm[i]] = s.summands()[i];
        InjComplex out(s.ctx_ptr(), s.present());
        for (auto &x : sm)
                out.add_summand(x.cone, x.deg);
        for (auto &[key, c] : s.entries())
                out.set_entry(perm[key.first], perm[key.second], c);
        return out;
}

namespace {

InjComplex maybe_shuffle(const InjComplex &s, std::mt19937 *rng)
{
        if (!rng)
                return s;
        std::vector<std::size_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), *rng);
        return permute_summands(s, perm);
}

/* Replace a list of representatives by a random unitriangular recombination. */
std::vector<ChainMap> maybe_mix(std::vector<ChainMap> reps, std::mt19937 *rng)
{
        if (!rng || reps.size() < 2)
                return reps;
        std::uniform_int_distribution<int> coeff(-3, 3);
        for (std::size_t i = 0; i < reps.size(); i++)
                for (std::size_t j = i + 1; j < reps.size(); j++) {
                        Rational c(coeff(*rng));
                        if (sgn(c) == 0)
                                continue;
                        for (auto &[key, v] : reps[j].comps) {
                                auto &acc = reps[i].comps[key];
                                if (acc.empty())
                                        acc.assign(v.size(), Rational(0));
                                for (std::size_t k = 0; k < v.size(); k++)
                                        acc[k] += c * v[k];
                        }
                }
        return reps;
}

} // namespace

BuildResult simple(const ContextPtr &ctx, FaceId tau, Truncation variant, const BuildOptions &opts)
{
        const Fan &fan = ctx->fan();
        std::vector<FaceId> order = opts.order ? *opts.order : default_simple_order(fan, tau);
        std::optional<std::mt19937> rng;
        if (opts.perturb_seed)
                rng.emplace(*opts.perturb_seed);
        std::mt19937 *r = rng ? &*rng : nullptr;

        BuildResult res;
        res.trace.order = order;
        InjComplex l = costandard(ctx, tau);
        for (FaceId rho : order) {
                l = maybe_shuffle(l, r);
                InjComplex n = costandard(ctx, rho);
                HomResult h = hom_spaces(l, n, true);
                BigradedDims kept;
                InjComplex next = l;
                int c = static_cast<int>(fan.codim(rho));
                for (auto &[ab, reps] : h.reps) {
                        bool keep = variant == Truncation::tau ? ab.u + ab.v <= 0 : ab.u - ab.v == 2;
                        if (!keep)
                                continue;
                        kept[ab] = reps.size();
                        for (auto &e : maybe_mix(reps, r)) {
                                std::size_t idx = next.add_summand(rho, {-c - ab.u + 2, -c - ab.v});
                                for (auto &[key, coeffs] : e.comps)
                                        next.set_entry(key.first, idx, coeffs);
                        }
                }
                l = minimize(next);
                res.trace.kept.push_back(kept);
                res.trace.sizes.push_back(l.size());
        }
        validate(l);
        res.complex = l;
        return res;
}

BuildResult injective_hull(const ContextPtr &ctx, FaceId tau, const BuildOptions &opts)
{
        const Fan &fan = ctx->fan();
        std::vector<FaceId> order = opts.order ? *opts.order : default_injective_order(fan, tau);
        std::optional<std::mt19937> rng;
        if (opts.perturb_seed)
                rng.emplace(*opts.perturb_seed);
        std::mt19937 *r = rng ? &*rng : nullptr;

        BuildResult res;
        res.trace.order = order;
        InjComplex inj = costandard(ctx, tau);
        for (FaceId rho : order) {
                InjComplex n = costandard(ctx, rho);
                int c = static_cast<int>(fan.codim(rho));
                BigradedDims kept;
                for (int round = 0;; round++) {
                        inj = maybe_shuffle(inj, r);
                        HomResult h = hom_spaces(n, inj, true);
                        InjComplex next = inj;
                        bool any = false;
                        for (auto &[ab, reps] : h.reps) {
                                if (ab.u + ab.v != 2)
                                        continue;
                                any = true;
                                kept[ab] += reps.size();
                                for (auto &e : maybe_mix(reps, r)) {
                                        std::size_t idx = next.add_summand(rho, {-c + ab.u - 2, -c + ab.v});
                                        for (auto &[key, coeffs] : e.comps)
                                                next.set_entry(idx, key.second, coeffs);
                                }
                        }
                        if (!any)
                                break;
                        if (round > 0)
                                throw DcatError("NonterminatingTwistRange", "Ext^1 classes survived a killing step");
                        inj = minimize(next);
                }
                res.trace.kept.push_back(kept);
                res.trace.sizes.push_back(inj.size());
        }
        validate(inj);
        res.complex = inj;
        return res;
}

} // namespace kdual
