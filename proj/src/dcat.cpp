#include "kdual/dcat.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace kdual {

InjComplex::InjComplex(ContextPtr ctx, std::vector<bool> present) : ctx_(std::move(ctx)), present_(std::move(present))
{
        if (present_.size() != ctx_->fan().size())
                throw DcatError("NotASubset", "presence mask has the wrong size");
}

InjComplex InjComplex::empty(ContextPtr ctx)
{
        std::size_t m = ctx->fan().size();
        return InjComplex(std::move(ctx), std::vector<bool>(m, true));
}

std::size_t InjComplex::add_summand(FaceId cone, Bidegree deg)
{
        if (!present_.at(cone))
                throw DcatError("NotASubset", "summand cone outside the quasifan");
        if (((deg.u - deg.v) % 2) != 0)
                throw DcatError("ParityViolation", "bidegree outside the Xi lattice");
        summands_.push_back({cone, deg});
        return summands_.size() - 1;
}

void InjComplex::set_entry(std::size_t from, std::size_t to, QVector coeffs)
{
        auto key = std::make_pair(from, to);
        if (is_zero(coeffs))
                entries_.erase(key);
        else
                entries_[key] = std::move(coeffs);
}

const QVector *InjComplex::entry(std::size_t from, std::size_t to) const
{
        auto it = entries_.find({from, to});
        return it == entries_.end() ? nullptr : &it->second;
}

std::size_t InjComplex::entry_degree(std::size_t from, std::size_t to) const
{
        return static_cast<std::size_t>((summands_[to].deg.v - summands_[from].deg.v) / 2);
}

namespace {

/* Matrix of g -> d o g, for d in Lambda^pd(Phi^tau_sigma)* and g in Lambda^q(Phi^rho_tau)*. */
QMatrix left_block(const FanContext &ctx, FaceId rho, FaceId tau, FaceId sigma, std::size_t pd, const QVector &d, std::size_t q)
{
        const QMatrix &c = ctx.compose_matrix(rho, tau, sigma, pd, q);
        std::size_t m = binomial(ctx.rel_dim(rho, tau), q);
        QMatrix out(c.rows(), m);
        for (std::size_t i = 0; i < d.size(); i++) {
                if (sgn(d[i]) == 0)
                        continue;
                for (std::size_t r = 0; r < c.rows(); r++)
                        for (std::size_t j = 0; j < m; j++)
                                if (sgn(c(r, i * m + j)) != 0)
                                        out(r, j) += c(r, i * m + j) * d[i];
        }
        return out;
}

/* Matrix of f -> f o d, for f in Lambda^pf(Phi^tau_sigma)* and d in Lambda^pd(Phi^rho_tau)*. */
QMatrix right_block(const FanContext &ctx, FaceId rho, FaceId tau, FaceId sigma, std::size_t pf, std::size_t pd, const QVector &d)
{
        const QMatrix &c = ctx.compose_matrix(rho, tau, sigma, pf, pd);
        std::size_t mf = binomial(ctx.rel_dim(tau, sigma), pf);
        std::size_t md = d.size();
        QMatrix out(c.rows(), mf);
        for (std::size_t i = 0; i < md; i++) {
                if (sgn(d[i]) == 0)
                        continue;
                for (std::size_t r = 0; r < c.rows(); r++)
                        for (std::size_t j = 0; j < mf; j++)
                                if (sgn(c(r, j * md + i)) != 0)
                                        out(r, j) += c(r, j * md + i) * d[i];
        }
        return out;
}

struct Adjacency {
        std::vector<std::vector<std::pair<std::size_t, const QVector *>>> out, in;
        explicit Adjacency(const InjComplex &s) : out(s.size()), in(s.size())
        {
                for (auto &[key, c] : s.entries()) {
                        out[key.first].push_back({key.second, &c});
                        in[key.second].push_back({key.first, &c});
                }
        }
};

/* Components of degree-k cochains S -> T[a]{b}. */
struct CochainIndex {
        struct Block {
                std::size_t s, t, p, offset, size;
        };
        std::vector<Block> blocks;
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;
        std::size_t total = 0;
};

CochainIndex cochain_index(const InjComplex &s, const InjComplex &t, Bidegree ab, int k)
{
        const FanContext &ctx = s.ctx();
        const Fan &fan = ctx.fan();
        CochainIndex idx;
        for (std::size_t i = 0; i < s.size(); i++) {
                const Summand &a = s.summands()[i];
                for (std::size_t j = 0; j < t.size(); j++) {
                        const Summand &b = t.summands()[j];
                        if (b.deg.u - ab.u - a.deg.u != 2 * k || !fan.leq(a.cone, b.cone))
                                continue;
                        int diff = b.deg.v - ab.v - a.deg.v;
                        if (diff < 0 || diff % 2 != 0)
                                continue;
                        std::size_t p = static_cast<std::size_t>(diff / 2);
                        std::size_t d = ctx.rel_dim(a.cone, b.cone);
                        if (p > d)
                                continue;
                        std::size_t size = binomial(d, p);
                        idx.where[{i, j}] = idx.blocks.size();
                        idx.blocks.push_back({i, j, p, idx.total, size});
                        idx.total += size;
                }
        }
        return idx;
}

/* Matrix of D f = d_T f - (-1)^k f d_S from degree k to degree k+1 cochains. */
QMatrix hom_differential(const InjComplex &s, const InjComplex &t, const CochainIndex &from, const CochainIndex &to, int k,
                         const Adjacency &as, const Adjacency &at)
{
        const FanContext &ctx = s.ctx();
        QMatrix m(to.total, from.total);
        int eps = (k % 2 == 0) ? 1 : -1;
        for (auto &blk : from.blocks) {
                FaceId cs = s.summands()[blk.s].cone, ct = t.summands()[blk.t].cone;
                for (auto &[t2, dv] : at.out[blk.t]) {
                        auto it = to.where.find({blk.s, t2});
                        if (it == to.where.end())
                                continue;
                        const auto &tb = to.blocks[it->second];
                        FaceId c2 = t.summands()[t2].cone;
                        std::size_t pd = t.entry_degree(blk.t, t2);
                        QMatrix l = left_block(ctx, cs, ct, c2, pd, *dv, blk.p);
                        for (std::size_t r = 0; r < l.rows(); r++)
                                for (std::size_t c = 0; c < l.cols(); c++)
                                        m(tb.offset + r, blk.offset + c) += l(r, c);
                }
                for (auto &[s0, dv] : as.in[blk.s]) {
                        auto it = to.where.find({s0, blk.t});
                        if (it == to.where.end())
                                continue;
                        const auto &tb = to.blocks[it->second];
                        FaceId c0 = s.summands()[s0].cone;
                        std::size_t pd = s.entry_degree(s0, blk.s);
                        QMatrix r_ = right_block(ctx, c0, cs, ct, blk.p, pd, *dv);
                        for (std::size_t r = 0; r < r_.rows(); r++)
                                for (std::size_t c = 0; c < r_.cols(); c++)
                                        if (eps > 0)
                                                m(tb.offset + r, blk.offset + c) -= r_(r, c);
                                        else
                                                m(tb.offset + r, blk.offset + c) += r_(r, c);
                }
        }
        return m;
}

ChainMap cochain_to_map(const InjComplex &s, const InjComplex &target, const CochainIndex &idx, const QVector &x)
{
        ChainMap f{s, target, {}};
        for (auto &blk : idx.blocks) {
                QVector c(x.begin() + blk.offset, x.begin() + blk.offset + blk.size);
                if (!is_zero(c))
                        f.comps[{blk.s, blk.t}] = c;
        }
        return f;
}

QVector map_to_cochain(const ChainMap &f, const CochainIndex &idx)
{
        QVector x(idx.total);
        for (auto &[key, c] : f.comps) {
                auto it = idx.where.find(key);
                if (it == idx.where.end())
                        throw DcatError("BadEntryDegree", "chain map component of impossible type");
                const auto &blk = idx.blocks[it->second];
                if (c.size() != blk.size)
                        throw DcatError("BadEntryDegree", "chain map component has the wrong size");
                for (std::size_t i = 0; i < c.size(); i++)
                        x[blk.offset + i] = c[i];
        }
        return x;
}

struct HomPiece {
        CochainIndex c0;
        QMatrix d0, dm1;
        InjComplex target;
};

HomPiece hom_piece(const InjComplex &s, const InjComplex &t, Bidegree ab)
{
        Adjacency as(s), at(t);
        HomPiece h;
        h.c0 = cochain_index(s, t, ab, 0);
        CochainIndex c1 = cochain_index(s, t, ab, 1), cm1 = cochain_index(s, t, ab, -1);
        h.d0 = hom_differential(s, t, h.c0, c1, 0, as, at);
        h.dm1 = hom_differential(s, t, cm1, h.c0, -1, as, at);
        return h;
}

std::vector<ChainMap> piece_reps(const InjComplex &s, const InjComplex &t, Bidegree ab, const HomPiece &h)
{
        QMatrix z = kernel_basis(h.d0);
        std::size_t nim = h.dm1.cols();
        QMatrix both(h.c0.total, nim + z.cols());
        for (std::size_t r = 0; r < h.c0.total; r++) {
                for (std::size_t c = 0; c < nim; c++)
                        both(r, c) = h.dm1(r, c);
                for (std::size_t c = 0; c < z.cols(); c++)
                        both(r, nim + c) = z(r, c);
        }
        Echelon e = rref(both);
        InjComplex target = shift(t, ab.u, ab.v);
        std::vector<ChainMap> reps;
        for (auto p : e.pivots)
                if (p >= nim)
                        reps.push_back(cochain_to_map(s, target, h.c0, z.column(p - nim)));
        return reps;
}

void check_same_context(const InjComplex &a, const InjComplex &b)
{
        if (a.ctx_ptr() != b.ctx_ptr())
                throw DcatError("ContextMismatch", "complexes live over different fans");
}

} // namespace

void validate(const InjComplex &s)
{
        const FanContext &ctx = s.ctx();
        const Fan &fan = ctx.fan();
        for (auto &sm : s.summands()) {
                if (!s.present().at(sm.cone))
                        throw DcatError("NotASubset", "summand cone outside the quasifan");
                if ((sm.deg.u - sm.deg.v) % 2 != 0)
                        throw DcatError("ParityViolation", "summand bidegree outside Xi");
        }
        for (auto &[key, c] : s.entries()) {
                const Summand &a = s.summands().at(key.first), &b = s.summands().at(key.second);
                if (b.deg.u != a.deg.u + 2)
                        throw DcatError("BadEntryDegree", "entry between non-adjacent complex degrees");
                if (!fan.leq(a.cone, b.cone))
                        throw DcatError("BadEntryDegree", "entry between incomparable cones");
                int diff = b.deg.v - a.deg.v;
                std::size_t d = ctx.rel_dim(a.cone, b.cone);
                if (diff < 0 || diff % 2 != 0 || static_cast<std::size_t>(diff / 2) > d)
                        throw DcatError("BadEntryDegree", "grading difference is not an exterior degree");
                if (c.size() != binomial(d, static_cast<std::size_t>(diff / 2)))
                        throw DcatError("BadEntryDegree", "entry coefficient vector has the wrong size");
        }
        Adjacency adj(s);
        for (std::size_t a = 0; a < s.size(); a++) {
                std::map<std::size_t, QVector> sums;
                for (auto &[b, f] : adj.out[a])
                        for (auto &[c, g] : adj.out[b]) {
                                ExtDual comp = compose_hom(ctx, s.summands()[a].cone, s.summands()[b].cone,
                                                           s.summands()[c].cone, {s.entry_degree(b, c), *g},
                                                           {s.entry_degree(a, b), *f});
                                auto &acc = sums[c];
                                if (acc.empty())
                                        acc.assign(comp.coeffs.size(), Rational(0));
                                for (std::size_t i = 0; i < acc.size(); i++)
                                        acc[i] += comp.coeffs[i];
                        }
                for (auto &[c, v] : sums)
                        if (!is_zero(v))
                                throw DcatError("DSquaredNonzero", "d^2 != 0 from summand " + std::to_string(a) +
                                                                           " to summand " + std::to_string(c));
        }
}

void validate_chain_map(const ChainMap &f)
{
        check_same_context(f.source, f.target);
        Adjacency as(f.source), at(f.target);
        CochainIndex c0 = cochain_index(f.source, f.target, {0, 0}, 0);
        CochainIndex c1 = cochain_index(f.source, f.target, {0, 0}, 1);
        QVector x = map_to_cochain(f, c0);
        QMatrix d = hom_differential(f.source, f.target, c0, c1, 0, as, at);
        if (!is_zero(d * x))
                throw DcatError("NotChainMap", "map does not commute with the differentials");
}

InjComplex shift(const InjComplex &s, int du, int dv)
{
        if ((du - dv) % 2 != 0)
                throw DcatError("ParityViolation", "shift leaves the Xi lattice");
        InjComplex out(s.ctx_ptr(), s.present());
        for (auto &sm : s.summands())
                out.add_summand(sm.cone, {sm.deg.u - du, sm.deg.v - dv});
        for (auto &[key, c] : s.entries())
                out.set_entry(key.first, key.second, c);
        return out;
}

InjComplex twist(const InjComplex &s, int k)
{
        return shift(s, k, -k);
}

InjComplex direct_sum(const InjComplex &a, const InjComplex &b)
{
        check_same_context(a, b);
        std::vector<bool> present = a.present();
        for (std::size_t i = 0; i < present.size(); i++)
                present[i] = present[i] || b.present()[i];
        InjComplex out(a.ctx_ptr(), present);
        for (auto &sm : a.summands())
                out.add_summand(sm.cone, sm.deg);
        for (auto &sm : b.summands())
                out.add_summand(sm.cone, sm.deg);
        for (auto &[key, c] : a.entries())
                out.set_entry(key.first, key.second, c);
        std::size_t off = a.size();
        for (auto &[key, c] : b.entries())
                out.set_entry(key.first + off, key.second + off, c);
        return out;
}

InjComplex mapping_cone(const ChainMap &f)
{
        check_same_context(f.source, f.target);
        const InjComplex &a = f.source, &b = f.target;
        std::vector<bool> present = b.present();
        for (std::size_t i = 0; i < present.size(); i++)
                present[i] = present[i] || a.present()[i];
        InjComplex out(b.ctx_ptr(), present);
        for (auto &sm : b.summands())
                out.add_summand(sm.cone, sm.deg);
        std::size_t off = b.size();
        for (auto &sm : a.summands())
                out.add_summand(sm.cone, {sm.deg.u - 2, sm.deg.v});
        for (auto &[key, c] : b.entries())
                out.set_entry(key.first, key.second, c);
        for (auto &[key, c] : a.entries()) {
                QVector neg = c;
                for (auto &x : neg)
                        x = -x;
                out.set_entry(key.first + off, key.second + off, neg);
        }
        for (auto &[key, c] : f.comps)
                out.set_entry(key.first + off, key.second, c);
        return out;
}

ChainMap identity_map(const InjComplex &s)
{
        ChainMap f{s, s, {}};
        for (std::size_t i = 0; i < s.size(); i++)
                f.comps[{i, i}] = QVector{Rational(1)};
        return f;
}

ChainMap zero_map(const InjComplex &s, const InjComplex &t)
{
        return ChainMap{s, t, {}};
}

ChainMap compose_maps(const ChainMap &g, const ChainMap &f)
{
        const FanContext &ctx = f.source.ctx();
        ChainMap h{f.source, g.target, {}};
        std::vector<std::vector<std::pair<std::size_t, const QVector *>>> gout(g.source.size());
        for (auto &[key, c] : g.comps)
                gout[key.first].push_back({key.second, &c});
        auto deg = [](const InjComplex &a, std::size_t i, const InjComplex &b, std::size_t j) {
                return static_cast<std::size_t>((b.summands()[j].deg.v - a.summands()[i].deg.v) / 2);
        };
        for (auto &[key, fc] : f.comps) {
                auto [si, ti] = key;
                for (auto &[wi, gc] : gout[ti]) {
                        ExtDual c = compose_hom(ctx, f.source.summands()[si].cone, f.target.summands()[ti].cone,
                                                g.target.summands()[wi].cone, {deg(g.source, ti, g.target, wi), *gc},
                                                {deg(f.source, si, f.target, ti), fc});
                        auto &acc = h.comps[{si, wi}];
                        if (acc.empty())
                                acc.assign(c.coeffs.size(), Rational(0));
                        for (std::size_t i = 0; i < acc.size(); i++)
                                acc[i] += c.coeffs[i];
                }
        }
        for (auto it = h.comps.begin(); it != h.comps.end();)
                it = is_zero(it->second) ? h.comps.erase(it) : std::next(it);
        return h;
}

namespace {

InjComplex keep_summands(const InjComplex &s, const std::vector<bool> &keep_cone, const std::vector<bool> &present)
{
        InjComplex out(s.ctx_ptr(), present);
        std::vector<std::size_t> where(s.size(), SIZE_MAX);
        for (std::size_t i = 0; i < s.size(); i++)
                if (keep_cone[s.summands()[i].cone])
                        where[i] = out.add_summand(s.summands()[i].cone, s.summands()[i].deg);
        for (auto &[key, c] : s.entries())
                if (where[key.first] != SIZE_MAX && where[key.second] != SIZE_MAX)
                        out.set_entry(where[key.first], where[key.second], c);
        return out;
}

} // namespace

InjComplex restrict_open(const InjComplex &s, const std::vector<bool> &open)
{
        QuasiFan q(s.fan_ptr(), s.present());
        if (!subfan_ops(q, open).is_open)
                throw DcatError("NotOpen", "restriction target is not open");
        return keep_summands(s, open, open);
}

InjComplex extend_closed(const InjComplex &s, const std::vector<bool> &larger)
{
        QuasiFan q(s.fan_ptr(), larger);
        if (!subfan_ops(q, s.present()).is_closed)
                throw DcatError("NotClosed", "complex does not live on a closed subset");
        InjComplex out(s.ctx_ptr(), larger);
        for (auto &sm : s.summands())
                out.add_summand(sm.cone, sm.deg);
        for (auto &[key, c] : s.entries())
                out.set_entry(key.first, key.second, c);
        return out;
}

InjComplex corestrict_closed(const InjComplex &s, const std::vector<bool> &closed)
{
        QuasiFan q(s.fan_ptr(), s.present());
        if (!subfan_ops(q, closed).is_closed)
                throw DcatError("NotClosed", "corestriction target is not closed");
        return keep_summands(s, closed, closed);
}

InjComplex stalk_restrict(const InjComplex &s, FaceId sigma)
{
        const FanContext &ctx = s.ctx();
        const Fan &fan = ctx.fan();
        if (!s.present().at(sigma))
                throw DcatError("MissingFaces", "cone not in the quasifan");
        std::vector<bool> point(fan.size(), false);
        point[sigma] = true;
        InjComplex out(s.ctx_ptr(), point);
        /* where[i][k] = first new index of the Lambda^k block of summand i */
        std::vector<std::vector<std::size_t>> where(s.size());
        for (std::size_t i = 0; i < s.size(); i++) {
                const Summand &a = s.summands()[i];
                if (!fan.leq(a.cone, sigma))
                        continue;
                std::size_t d = ctx.rel_dim(a.cone, sigma);
                for (std::size_t k = 0; k <= d; k++) {
                        where[i].push_back(out.size());
                        for (std::size_t m = 0; m < binomial(d, k); m++)
                                out.add_summand(sigma, {a.deg.u, a.deg.v + 2 * static_cast<int>(k)});
                }
        }
        for (auto &[key, f] : s.entries()) {
                auto [i, j] = key;
                FaceId ci = s.summands()[i].cone, cj = s.summands()[j].cone;
                if (!fan.leq(cj, sigma))
                        continue;
                std::size_t p = s.entry_degree(i, j);
                std::size_t dj = ctx.rel_dim(cj, sigma), di = ctx.rel_dim(ci, sigma);
                for (std::size_t kj = 0; kj <= dj && kj + p <= di; kj++) {
                        QMatrix r = right_block(ctx, ci, cj, sigma, kj, p, f);
                        for (std::size_t a = 0; a < r.rows(); a++)
                                for (std::size_t b = 0; b < r.cols(); b++)
                                        if (sgn(r(a, b)) != 0)
                                                out.set_entry(where[i][kj + p] + a, where[j][kj] + b, QVector{r(a, b)});
                }
        }
        return out;
}

BigradedDims scalar_cohomology(const InjComplex &s)
{
        std::map<Bidegree, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < s.size(); i++)
                groups[s.summands()[i].deg].push_back(i);
        auto block = [&](Bidegree from, Bidegree to) {
                auto fi = groups.find(from), ti = groups.find(to);
                if (fi == groups.end() || ti == groups.end())
                        return std::size_t(0);
                QMatrix m(ti->second.size(), fi->second.size());
                bool any = false;
                for (std::size_t c = 0; c < fi->second.size(); c++)
                        for (std::size_t r = 0; r < ti->second.size(); r++)
                                if (auto e = s.entry(fi->second[c], ti->second[r])) {
                                        if (e->size() != 1)
                                                throw DcatError("BadEntryDegree", "non-scalar entry in a point complex");
                                        m(r, c) = (*e)[0];
                                        any = true;
                                }
                return any ? rank(m) : std::size_t(0);
        };
        BigradedDims out;
        for (auto &[deg, members] : groups) {
                std::size_t dim = members.size() - block(deg, {deg.u + 2, deg.v}) - block({deg.u - 2, deg.v}, deg);
                if (dim)
                        out[deg] = dim;
        }
        return out;
}

BigradedDims gamma_stalk(const InjComplex &s, FaceId sigma)
{
        return scalar_cohomology(stalk_restrict(s, sigma));
}

BigradedDims gamma_costalk(const InjComplex &s, FaceId sigma)
{
        const Fan &fan = s.fan();
        if (!s.present().at(sigma))
                throw DcatError("MissingFaces", "cone not in the quasifan");
        std::vector<bool> point(fan.size(), false);
        point[sigma] = true;
        return scalar_cohomology(keep_summands(s, point, point));
}

std::size_t hom_dim(const InjComplex &s, const InjComplex &t, Bidegree ab)
{
        check_same_context(s, t);
        HomPiece h = hom_piece(s, t, ab);
        return h.c0.total - rank(h.d0) - rank(h.dm1);
}

std::vector<ChainMap> hom_reps(const InjComplex &s, const InjComplex &t, Bidegree ab)
{
        check_same_context(s, t);
        return piece_reps(s, t, ab, hom_piece(s, t, ab));
}

std::vector<ChainMap> chain_map_basis(const InjComplex &s, const InjComplex &t)
{
        check_same_context(s, t);
        Adjacency as(s), at(t);
        CochainIndex c0 = cochain_index(s, t, {0, 0}, 0), c1 = cochain_index(s, t, {0, 0}, 1);
        QMatrix z = kernel_basis(hom_differential(s, t, c0, c1, 0, as, at));
        std::vector<ChainMap> out;
        for (std::size_t j = 0; j < z.cols(); j++)
                out.push_back(cochain_to_map(s, t, c0, z.column(j)));
        return out;
}

HomResult hom_spaces(const InjComplex &s, const InjComplex &t, bool with_reps)
{
        check_same_context(s, t);
        const FanContext &ctx = s.ctx();
        std::set<Bidegree> candidates;
        for (auto &a : s.summands())
                for (auto &b : t.summands()) {
                        if (!ctx.fan().leq(a.cone, b.cone))
                                continue;
                        int du = b.deg.u - a.deg.u;
                        for (std::size_t p = 0; p <= ctx.rel_dim(a.cone, b.cone); p++)
                                candidates.insert({du, b.deg.v - a.deg.v - 2 * static_cast<int>(p)});
                }
        HomResult res;
        for (auto ab : candidates) {
                HomPiece h = hom_piece(s, t, ab);
                std::size_t dim = h.c0.total - rank(h.d0) - rank(h.dm1);
                if (!dim)
                        continue;
                res.dims[ab] = dim;
                if (with_reps)
                        res.reps[ab] = piece_reps(s, t, ab, h);
        }
        return res;
}

InjComplex minimize(const InjComplex &s)
{
        const FanContext &ctx = s.ctx();
        std::size_t n = s.size();
        std::vector<bool> alive(n, true);
        std::vector<std::map<std::size_t, QVector>> out(n);
        std::vector<std::set<std::size_t>> in(n);
        for (auto &[key, c] : s.entries()) {
                out[key.first][key.second] = c;
                in[key.second].insert(key.first);
        }
        const auto &sm = s.summands();
        auto degree = [&](std::size_t a, std::size_t b) { return static_cast<std::size_t>((sm[b].deg.v - sm[a].deg.v) / 2); };
        for (;;) {
                std::size_t x = SIZE_MAX, y = SIZE_MAX;
                for (std::size_t i = 0; i < n && x == SIZE_MAX; i++) {
                        if (!alive[i])
                                continue;
                        for (auto &[j, c] : out[i])
                                if (sm[i].cone == sm[j].cone && sm[i].deg.v == sm[j].deg.v && sgn(c[0]) != 0) {
                                        x = i;
                                        y = j;
                                        break;
                                }
                }
                if (x == SIZE_MAX)
                        break;
                Rational cinv = 1 / out[x][y][0];
                std::vector<std::size_t> us;
                for (auto u : in[y])
                        if (u != x)
                                us.push_back(u);
                std::vector<std::size_t> ws;
                for (auto &[w, c] : out[x])
                        if (w != y)
                                ws.push_back(w);
                for (auto u : us)
                        for (auto w : ws) {
                                ExtDual comp = compose_hom(ctx, sm[u].cone, sm[y].cone, sm[w].cone, {degree(x, w), out[x][w]},
                                                           {degree(u, y), out[u][y]});
                                auto it = out[u].find(w);
                                if (it == out[u].end()) {
                                        QVector v(comp.coeffs.size());
                                        for (std::size_t i = 0; i < v.size(); i++)
                                                v[i] = -comp.coeffs[i] * cinv;
                                        if (!is_zero(v)) {
                                                out[u][w] = v;
                                                in[w].insert(u);
                                        }
                                } else {
                                        for (std::size_t i = 0; i < it->second.size(); i++)
                                                it->second[i] -= comp.coeffs[i] * cinv;
                                        if (is_zero(it->second)) {
                                                out[u].erase(it);
                                                in[w].erase(u);
                                        }
                                }
                        }
                for (std::size_t z : {x, y}) {
                        for (auto &[w, c] : out[z])
                                in[w].erase(z);
                        out[z].clear();
                        for (auto u : in[z])
                                out[u].erase(z);
                        in[z].clear();
                        alive[z] = false;
                }
        }
        InjComplex res(s.ctx_ptr(), s.present());
        std::vector<std::size_t> where(n, SIZE_MAX);
        for (std::size_t i = 0; i < n; i++)
                if (alive[i])
                        where[i] = res.add_summand(sm[i].cone, sm[i].deg);
        for (std::size_t i = 0; i < n; i++)
                for (auto &[j, c] : out[i])
                        if (alive[i] && alive[j])
                                res.set_entry(where[i], where[j], c);
        return res;
}

std::vector<Summand> sorted_summands(const InjComplex &s)
{
        std::vector<Summand> v = s.summands();
        std::sort(v.begin(), v.end());
        return v;
}

IsoResult is_isomorphic(const InjComplex &s0, const InjComplex &t0)
{
        check_same_context(s0, t0);
        InjComplex s = minimize(s0), t = minimize(t0);
        IsoResult res;
        if (sorted_summands(s) != sorted_summands(t)) {
                res.reason = "summand multisets differ";
                return res;
        }
        if (s.size() == 0) {
                res.isomorphic = true;
                res.witness = zero_map(s, t);
                return res;
        }
        std::vector<ChainMap> basis = chain_map_basis(s, t);
        if (basis.empty()) {
                res.reason = "no nonzero chain maps";
                return res;
        }
        std::map<Summand, std::vector<std::size_t>> gs, gt;
        for (std::size_t i = 0; i < s.size(); i++)
                gs[s.summands()[i]].push_back(i);
        for (std::size_t i = 0; i < t.size(); i++)
                gt[t.summands()[i]].push_back(i);
        std::mt19937 rng(20240611u);
        std::uniform_int_distribution<int> coeff(-97, 97);
        for (int attempt = 0; attempt < 6; attempt++) {
                ChainMap f{s, t, {}};
                for (auto &b : basis) {
                        Rational c = attempt == 0 ? Rational(1) : Rational(coeff(rng));
                        for (auto &[key, v] : b.comps) {
                                auto &acc = f.comps[key];
                                if (acc.empty())
                                        acc.assign(v.size(), Rational(0));
                                for (std::size_t i = 0; i < v.size(); i++)
                                        acc[i] += c * v[i];
                        }
                }
                bool ok = true;
                for (auto &[key, rows] : gs) {
                        const auto &cols = gt[key];
                        QMatrix m(rows.size(), cols.size());
                        for (std::size_t a = 0; a < rows.size(); a++)
                                for (std::size_t b = 0; b < cols.size(); b++) {
                                        auto it = f.comps.find({rows[a], cols[b]});
                                        if (it != f.comps.end())
                                                m(a, b) = it->second[0];
                                }
                        if (rank(m) < rows.size()) {
                                ok = false;
                                break;
                        }
                }
                if (ok) {
                        for (auto it = f.comps.begin(); it != f.comps.end();)
                                it = is_zero(it->second) ? f.comps.erase(it) : std::next(it);
                        res.isomorphic = true;
                        res.witness = f;
                        return res;
                }
        }
        res.reason = "no chain map with invertible scalar blocks found";
        return res;
}

Perversity perversity_check(const InjComplex &s)
{
        const Fan &fan = s.fan();
        Perversity p;
        for (FaceId sigma = 0; sigma < fan.size(); sigma++) {
                if (!s.present()[sigma])
                        continue;
                int wall = -2 * static_cast<int>(fan.codim(sigma));
                for (auto &[deg, dim] : gamma_stalk(s, sigma))
                        if (dim && deg.u + deg.v > wall)
                                p.le0 = false;
                for (auto &[deg, dim] : gamma_costalk(s, sigma))
                        if (dim && deg.u + deg.v < wall)
                                p.ge0 = false;
        }
        return p;
}

std::pair<InjComplex, InjComplex> t_truncate_point(const InjComplex &s, int level)
{
        const Fan &fan = s.fan();
        FaceId sigma = SIZE_MAX;
        for (FaceId f = 0; f < fan.size(); f++)
                if (s.present()[f]) {
                        if (sigma != SIZE_MAX)
                                throw DcatError("NotAPoint", "truncation needs a one-cone quasifan");
                        sigma = f;
                }
        if (sigma == SIZE_MAX)
                throw DcatError("NotAPoint", "empty quasifan");
        /* doubled perverse degree of a generator: u + v; boundary level c */
        int c = 2 * (level - static_cast<int>(fan.codim(sigma)));
        std::map<Bidegree, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < s.size(); i++)
                groups[s.summands()[i].deg].push_back(i);

        InjComplex low(s.ctx_ptr(), s.present()), high(s.ctx_ptr(), s.present());
        std::vector<std::size_t> in_low(s.size(), SIZE_MAX), in_high(s.size(), SIZE_MAX);
        for (std::size_t i = 0; i < s.size(); i++) {
                const Summand &a = s.summands()[i];
                int lvl = a.deg.u + a.deg.v;
                if (lvl <= c)
                        in_low[i] = low.add_summand(a.cone, a.deg);
                else if (lvl >= c + 4)
                        in_high[i] = high.add_summand(a.cone, a.deg);
        }
        for (auto &[key, e] : s.entries()) {
                if (in_low[key.first] != SIZE_MAX && in_low[key.second] != SIZE_MAX)
                        low.set_entry(in_low[key.first], in_low[key.second], e);
                if (in_high[key.first] != SIZE_MAX && in_high[key.second] != SIZE_MAX)
                        high.set_entry(in_high[key.first], in_high[key.second], e);
        }
        /* the boundary level c+2: image of d goes low, a complement goes high */
        for (auto &[deg, members] : groups) {
                if (deg.u + deg.v != c + 2)
                        continue;
                std::size_t m = members.size();
                std::vector<std::size_t> sources;
                auto src = groups.find({deg.u - 2, deg.v});
                if (src != groups.end())
                        sources = src->second;
                std::vector<QVector> images;
                for (auto a : sources) {
                        QVector col(m);
                        for (std::size_t r = 0; r < m; r++)
                                if (auto e = s.entry(a, members[r]))
                                        col[r] = (*e)[0];
                        images.push_back(col);
                }
                QMatrix ib = images.empty() ? QMatrix(0, m) : canonical_subspace_basis(images, m);
                std::size_t r = ib.rows();
                Echelon e = rref(ib);
                std::vector<bool> pivot(m, false);
                for (auto p : e.pivots)
                        pivot[p] = true;
                QMatrix basis(m, m); /* columns: image basis then complement unit vectors */
                std::size_t col = 0;
                for (std::size_t k = 0; k < r; k++, col++)
                        for (std::size_t row = 0; row < m; row++)
                                basis(row, col) = ib(k, row);
                std::vector<std::size_t> comp;
                for (std::size_t j = 0; j < m; j++)
                        if (!pivot[j]) {
                                basis(j, col++) = 1;
                                comp.push_back(j);
                        }
                auto inv = inverse(basis);
                std::vector<std::size_t> low_new, high_new;
                for (std::size_t k = 0; k < r; k++)
                        low_new.push_back(low.add_summand(sigma, deg));
                for (std::size_t k = 0; k < comp.size(); k++)
                        high_new.push_back(high.add_summand(sigma, deg));
                for (std::size_t a = 0; a < sources.size(); a++) {
                        QVector x = (*inv) * images[a];
                        for (std::size_t k = 0; k < r; k++)
                                if (sgn(x[k]) != 0)
                                        low.set_entry(in_low[sources[a]], low_new[k], QVector{x[k]});
                }
                auto tgt = groups.find({deg.u + 2, deg.v});
                if (tgt != groups.end())
                        for (std::size_t k = 0; k < comp.size(); k++)
                                for (auto b : tgt->second)
                                        if (auto e = s.entry(members[comp[k]], b))
                                                high.set_entry(high_new[k], in_high[b], *e);
        }
        return {low, high};
}

std::string describe(const InjComplex &s)
{
        std::ostringstream os;
        for (std::size_t i = 0; i < s.size(); i++) {
                const Summand &a = s.summands()[i];
                os << "#" << i << " (cone " << a.cone << ", " << a.deg.u << "/2, " << a.deg.v << "/2)\n";
        }
        for (auto &[key, c] : s.entries()) {
                os << "  " << key.first << " -> " << key.second << " [";
                for (std::size_t i = 0; i < c.size(); i++)
                        os << (i ? " " : "") << c[i].get_str();
                os << "]\n";
        }
        return os.str();
}

} // namespace kdual
