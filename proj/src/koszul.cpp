#include "kdual/koszul.hpp"
#include "kdual/parallel.hpp"

namespace kdual {

namespace {

QVector wedge_rows(const QMatrix &rows, std::size_t n)
{
        QVector w = ambient::unit(n);
        for (std::size_t i = 0; i < rows.rows(); i++)
                w = ambient::wedge(w, ambient::vector(rows.row(i)), n);
        return w;
}

InjComplex transport(const ContextPtr &src, const ContextPtr &dst, const std::vector<FaceId> &perp, const InjComplex &s)
{
        if (s.ctx_ptr() != src)
                throw DcatError("ContextMismatch", "complex does not live over the duality source");
        const Fan &fan = src->fan();
        int n = static_cast<int>(fan.ambient_dim());
        std::vector<bool> present(dst->fan().size(), false);
        for (FaceId f = 0; f < fan.size(); f++)
                if (s.present()[f])
                        present[perp[f]] = true;
        InjComplex out(dst, present);
        for (auto &sm : s.summands()) {
                int dim = static_cast<int>(fan.face(sm.cone).dim);
                out.add_summand(perp[sm.cone], {-sm.deg.u - n, sm.deg.v - 2 * dim + n});
        }
        for (auto &[key, g] : s.entries()) {
                FaceId mu = s.summands()[key.first].cone, nu = s.summands()[key.second].cone;
                out.set_entry(key.second, key.first,
                              kappa_entry(*src, *dst, perp, mu, nu, s.entry_degree(key.first, key.second), g));
        }
        return out;
}

} // namespace

QVector kappa_entry(const FanContext &src, const FanContext &dst, const std::vector<FaceId> &perp, FaceId mu, FaceId nu,
                    std::size_t p, const QVector &g)
{
        std::size_t n = src.n();
        std::size_t d = src.rel_dim(mu, nu);
        const ExtAlgebra &x = src.rel(mu, nu);
        const ExtAlgebra &w = dst.rel(perp[nu], perp[mu]);
        if (w.dim() != d)
                throw DcatError("PairingDegenerate", "dual relative piece has the wrong dimension");
        QVector omega_mu = wedge_rows(src.completion().phi(mu), n);
        QVector omega_nu = wedge_rows(src.completion().phi(nu), n);
        std::size_t nx = x.graded_dim(p);
        QMatrix m(std::size_t(1) << n, nx);
        for (std::size_t i = 0; i < nx; i++) {
                QVector e = ambient::wedge(omega_mu, x.ambient(x.monomials(p)[i]), n);
                for (std::size_t r = 0; r < e.size(); r++)
                        m(r, i) = e[r];
        }
        std::size_t q = d - p;
        QVector out(w.graded_dim(q));
        for (std::size_t j = 0; j < out.size(); j++) {
                Mask mono = w.monomials(q)[j];
                QVector a = omega_nu;
                for (int b = static_cast<int>(w.dim()) - 1; b >= 0; b--)
                        if (mono & (Mask(1) << b))
                                a = ambient::contract(w.basis().row(static_cast<std::size_t>(b)), a, n);
                auto coeffs = solve(m, a);
                if (!coeffs)
                        throw DcatError("PairingDegenerate", "contraction leaves omega_mu ^ Lambda(Phi^mu_nu)");
                for (std::size_t i = 0; i < nx; i++)
                        out[j] += g[i] * (*coeffs)[i];
        }
        /* reversal sign of Lambda^p makes the transport strictly contravariant */
        if ((p * (p - 1) / 2) % 2)
                for (auto &c : out)
                        c = -c;
        return out;
}

DualityContext make_duality(const ContextPtr &primal)
{
        DualCone dcone = dual_cone(primal->fan());
        Completion phi = dual_completion(primal->fan(), primal->completion(), dcone);
        DualityContext dc;
        dc.primal = primal;
        auto dual_fan = std::make_shared<const Fan>(dcone.dual);
        dc.dual = make_context(dual_fan, std::move(phi));
        dc.perp = dcone.perp;
        dc.perp_inv.assign(dc.perp.size(), 0);
        for (FaceId f = 0; f < dc.perp.size(); f++)
                dc.perp_inv[dc.perp[f]] = f;
        dc.omega_unit = determinant(primal->completion().phi(primal->fan().top()));
        return dc;
}

InjComplex kappa(const DualityContext &dc, const InjComplex &s)
{
        return transport(dc.primal, dc.dual, dc.perp, s);
}

InjComplex kappa_inverse(const DualityContext &dc, const InjComplex &t)
{
        return transport(dc.dual, dc.primal, dc.perp_inv, t);
}

ChainMap kappa_map(const DualityContext &dc, const ChainMap &f)
{
        ChainMap out{kappa(dc, f.target), kappa(dc, f.source), {}};
        const auto &ss = f.source.summands(), &ts = f.target.summands();
        for (auto &[key, g] : f.comps) {
                FaceId mu = ss[key.first].cone, nu = ts[key.second].cone;
                auto p = static_cast<std::size_t>((ts[key.second].deg.v - ss[key.first].deg.v) / 2);
                QVector k = kappa_entry(*dc.primal, *dc.dual, dc.perp, mu, nu, p, g);
                if (!is_zero(k))
                        out.comps[{key.second, key.first}] = k;
        }
        return out;
}

bool DualityReport::passed() const
{
        for (auto *v : {&simple_to_injective, &injective_to_simple, &ext_ring})
                for (auto &c : *v)
                        if (!c.ok)
                                return false;
        return koszul;
}

std::vector<KoszulEntry> koszul_table(const ContextPtr &ctx, unsigned jobs)
{
        const Fan &fan = ctx->fan();
        std::vector<InjComplex> l(fan.size());
        parallel_for(fan.size(), jobs, [&](std::size_t t) { l[t] = simple(ctx, t).complex; });
        std::vector<KoszulEntry> out(fan.size() * fan.size());
        parallel_for(out.size(), jobs, [&](std::size_t i) {
                FaceId t = i / fan.size(), r = i % fan.size();
                out[i] = {t, r, hom_spaces(l[t], l[r]).dims};
        });
        return out;
}

DualityReport verify_duality(const DualityContext &dc, const VerifyOptions &opts)
{
        const Fan &fan = dc.primal->fan();
        std::size_t m = fan.size();
        DualityReport rep;
        std::vector<InjComplex> lp(m), ip(m), ld(m), id(m);
        parallel_for(4 * m, opts.jobs, [&](std::size_t i) {
                FaceId f = i % m;
                switch (i / m) {
                case 0: lp[f] = simple(dc.primal, f).complex; break;
                case 1: ip[f] = injective_hull(dc.primal, f).complex; break;
                case 2: ld[f] = simple(dc.dual, f).complex; break;
                default: id[f] = injective_hull(dc.dual, f).complex; break;
                }
        });
        if (opts.duality) {
                rep.simple_to_injective.resize(m);
                rep.injective_to_simple.resize(m);
                parallel_for(2 * m, opts.jobs, [&](std::size_t i) {
                        FaceId t = i % m;
                        FaceCheck c{t, dc.perp[t], false, {}};
                        try {
                                InjComplex k = kappa(dc, i < m ? lp[t] : ip[t]);
                                validate(k);
                                IsoResult r = is_isomorphic(k, i < m ? id[dc.perp[t]] : ld[dc.perp[t]]);
                                c.ok = r.isomorphic;
                                c.detail = r.reason;
                        } catch (const std::exception &e) {
                                c.detail = e.what();
                        }
                        (i < m ? rep.simple_to_injective : rep.injective_to_simple)[t] = c;
                });
        }
        if (opts.koszulity || opts.ext_ring) {
                rep.koszul_table.resize(m * m);
                parallel_for(m * m, opts.jobs, [&](std::size_t i) {
                        FaceId t = i / m, r = i % m;
                        rep.koszul_table[i] = {t, r, hom_spaces(lp[t], lp[r]).dims};
                });
                for (auto &e : rep.koszul_table)
                        for (auto &[ab, dim] : e.dims)
                                if (dim && ab.u != ab.v)
                                        rep.koszul = false;
        }
        if (opts.ext_ring) {
                rep.ext_ring.resize(m * m);
                parallel_for(m * m, opts.jobs, [&](std::size_t i) {
                        FaceId t = i / m, r = i % m;
                        FaceCheck c{t, r, false, {}};
                        BigradedDims ext, end;
                        for (auto &[ab, dim] : rep.koszul_table[i].dims)
                                if (ab.u == ab.v)
                                        ext[{ab.u, ab.u}] = dim;
                        for (auto &[ab, dim] : hom_spaces(id[dc.perp[r]], id[dc.perp[t]]).dims)
                                if (ab.u == -ab.v)
                                        end[{ab.u, ab.u}] = dim;
                        c.ok = ext == end;
                        if (!c.ok)
                                c.detail = "graded dimensions differ";
                        rep.ext_ring[i] = c;
                });
        }
        return rep;
}

} // namespace kdual
