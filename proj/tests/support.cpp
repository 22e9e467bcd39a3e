#include "support.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace testsup {

QVector vec(std::initializer_list<long> xs)
{
        QVector v;
        for (long x : xs)
                v.push_back(Rational(x));
        return v;
}

Fan ray_fan() { return build_fan({{vec({1})}}, 1); }
Fan quadrant_fan() { return build_fan({{vec({1, 0}), vec({0, 1})}}, 2); }
Fan simplex3_fan() { return build_fan({{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}}, 3); }
Fan square_cone_fan()
{
        return build_fan({{vec({1, 1, 1}), vec({-1, 1, 1}), vec({-1, -1, 1}), vec({1, -1, 1})}}, 3);
}

Fan mgon_cone(int m)
{
        std::vector<QVector> gens;
        for (long i = 0; i < m; i++)
                gens.push_back(vec({i, i * i, 1}));
        return build_fan({gens}, 3);
}

std::vector<NamedContext> test_contexts(bool with_duals)
{
        std::vector<NamedContext> out = {{"ray", make_context(ray_fan())},
                                         {"quadrant", make_context(quadrant_fan())},
                                         {"simplex3", make_context(simplex3_fan())},
                                         {"square_cone", make_context(square_cone_fan())}};
        if (with_duals) {
                std::size_t k = out.size();
                for (std::size_t i = 0; i < k; i++)
                        out.push_back({out[i].name + "_dual", make_duality(out[i].ctx).dual});
        }
        return out;
}

FaceId face_by_rays(const Fan &fan, const std::vector<QVector> &rays)
{
        if (rays.empty())
                return fan.zero_face();
        auto f = fan.find_by_vectors(rays);
        if (!f)
                throw std::runtime_error("no face with these rays");
        return *f;
}

std::vector<std::size_t> brute_force_face_counts(const std::vector<QVector> &gens, std::size_t n)
{
        std::size_t m = gens.size();
        std::vector<std::vector<bool>> facets;
        /* every (n-1)-subset spanning a hyperplane that supports the cone gives a facet */
        std::vector<bool> choose(m, false);
        std::fill(choose.begin(), choose.begin() + static_cast<long>(n - 1), true);
        std::sort(choose.begin(), choose.end());
        do {
                std::vector<QVector> rows;
                for (std::size_t i = 0; i < m; i++)
                        if (choose[i])
                                rows.push_back(gens[i]);
                QMatrix a = QMatrix::from_rows(rows, n);
                if (rank(a) != n - 1)
                        continue;
                QVector xi = kernel_basis(a).column(0);
                int sign = 0;
                bool supporting = true;
                for (auto &g : gens) {
                        int s = sgn(dot(xi, g));
                        if (s == 0)
                                continue;
                        if (sign == 0)
                                sign = s;
                        else if (s != sign)
                                supporting = false;
                }
                if (!supporting)
                        continue;
                std::vector<bool> on(m);
                for (std::size_t i = 0; i < m; i++)
                        on[i] = sgn(dot(xi, gens[i])) == 0;
                if (std::find(facets.begin(), facets.end(), on) == facets.end())
                        facets.push_back(on);
        } while (std::next_permutation(choose.begin(), choose.end()));

        std::vector<std::vector<bool>> faces = {std::vector<bool>(m, true)};
        for (std::size_t i = 0; i < faces.size(); i++)
                for (auto &f : facets) {
                        std::vector<bool> meet(m);
                        for (std::size_t j = 0; j < m; j++)
                                meet[j] = faces[i][j] && f[j];
                        if (std::find(faces.begin(), faces.end(), meet) == faces.end())
                                faces.push_back(meet);
                }
        std::vector<std::size_t> counts(n + 1, 0);
        for (auto &f : faces) {
                std::vector<QVector> rows;
                for (std::size_t j = 0; j < m; j++)
                        if (f[j])
                                rows.push_back(gens[j]);
                counts[rows.empty() ? 0 : rank(QMatrix::from_rows(rows, n))]++;
        }
        return counts;
}

Multivector mv_vector(const QVector &v)
{
        Multivector out;
        for (std::size_t i = 0; i < v.size(); i++)
                if (v[i] != 0)
                        out[{static_cast<int>(i)}] = v[i];
        return out;
}

Multivector mv_wedge(const Multivector &a, const Multivector &b)
{
        Multivector out;
        for (auto &[ka, ca] : a)
                for (auto &[kb, cb] : b) {
                        std::vector<int> k = ka;
                        k.insert(k.end(), kb.begin(), kb.end());
                        int inversions = 0;
                        bool repeated = false;
                        for (std::size_t i = 0; i < k.size(); i++)
                                for (std::size_t j = i + 1; j < k.size(); j++) {
                                        if (k[i] == k[j])
                                                repeated = true;
                                        if (k[i] > k[j])
                                                inversions++;
                                }
                        if (repeated)
                                continue;
                        std::sort(k.begin(), k.end());
                        Rational c = ca * cb;
                        out[k] += inversions % 2 ? Rational(-c) : c;
                }
        for (auto it = out.begin(); it != out.end();)
                it = it->second == 0 ? out.erase(it) : std::next(it);
        return out;
}

Multivector mv_monomial(const QMatrix &basis, Mask m)
{
        Multivector out{{{}, Rational(1)}};
        for (std::size_t r = 0; r < basis.rows(); r++)
                if (m & (Mask(1) << r))
                        out = mv_wedge(out, mv_vector(basis.row(r)));
        return out;
}

QVector mv_coordinates(const ExtAlgebra &alg, std::size_t k, const Multivector &x)
{
        const auto &mons = alg.monomials(k);
        std::vector<Multivector> cols;
        std::map<std::vector<int>, std::size_t> keys;
        for (Mask m : mons)
                cols.push_back(mv_monomial(alg.basis(), m));
        for (auto &c : cols)
                for (auto &[key, v] : c)
                        keys.emplace(key, 0);
        for (auto &[key, v] : x)
                keys.emplace(key, 0);
        std::size_t i = 0;
        for (auto &[key, idx] : keys)
                idx = i++;
        QMatrix a(keys.size(), cols.size());
        QVector b(keys.size());
        for (std::size_t j = 0; j < cols.size(); j++)
                for (auto &[key, v] : cols[j])
                        a(keys[key], j) = v;
        for (auto &[key, v] : x)
                b[keys[key]] = v;
        auto sol = solve(a, b);
        if (!sol)
                throw std::runtime_error("multivector outside the exterior power");
        return *sol;
}

bool same_complex(const InjComplex &a, const InjComplex &b)
{
        return a.present() == b.present() && a.summands() == b.summands() && a.entries() == b.entries();
}

bool same_map(const ChainMap &f, const ChainMap &g)
{
        return same_complex(f.source, g.source) && same_complex(f.target, g.target) && f.comps == g.comps;
}

BigradedDims translate(const BigradedDims &d, int du, int dv)
{
        BigradedDims out;
        for (auto &[deg, k] : d)
                out[{deg.u + du, deg.v + dv}] = k;
        return out;
}

Rational Rng::scalar(bool nonzero)
{
        for (;;) {
                Rational q = make_rational(range(-4, 4), range(1, 3));
                if (!nonzero || q != 0)
                        return q;
        }
}

QVector Rng::vector(std::size_t n)
{
        QVector v(n);
        for (auto &x : v)
                x = scalar();
        return v;
}

ObjectBank::ObjectBank(ContextPtr c) : ctx(std::move(c))
{
        for (FaceId t = 0; t < ctx->fan().size(); t++) {
                costandards.push_back(costandard(ctx, t));
                standards.push_back(standard(ctx, t));
                simples.push_back(simple(ctx, t).complex);
                injectives.push_back(injective_hull(ctx, t).complex);
        }
}

InjComplex random_three_term(const ContextPtr &ctx, Rng &rng)
{
        const Fan &fan = ctx->fan();
        InjComplex s = InjComplex::empty(ctx);
        std::vector<std::size_t> level[3];
        for (int l = 0; l < 3; l++) {
                int count = rng.range(1, l == 1 ? 3 : 2);
                for (int i = 0; i < count; i++) {
                        FaceId c = static_cast<FaceId>(rng.range(0, static_cast<int>(fan.size()) - 1));
                        int v = 2 * rng.range(-1, 2) + 2 * l;
                        level[l].push_back(s.add_summand(c, {2 * l, v}));
                }
        }
        auto entry_degree = [&](std::size_t a, std::size_t b) -> int {
                const Summand &x = s.summands()[a], &y = s.summands()[b];
                if (!fan.leq(x.cone, y.cone))
                        return -1;
                int p = (y.deg.v - x.deg.v) / 2;
                if (p < 0 || static_cast<std::size_t>(p) > ctx->rel_dim(x.cone, y.cone))
                        return -1;
                return p;
        };
        auto entry_size = [&](std::size_t a, std::size_t b, int p) {
                return ctx->rel(s.summands()[a].cone, s.summands()[b].cone).graded_dim(static_cast<std::size_t>(p));
        };
        for (std::size_t a : level[0])
                for (std::size_t b : level[1]) {
                        int p = entry_degree(a, b);
                        if (p >= 0 && rng.coin(80))
                                s.set_entry(a, b, rng.vector(entry_size(a, b, p)));
                }
        /* unknowns: coefficients of all admissible level 1 -> level 2 entries */
        struct Slot {
                std::size_t from, to;
                int p;
                std::size_t offset, size;
        };
        std::vector<Slot> slots;
        std::size_t nvars = 0;
        for (std::size_t b : level[1])
                for (std::size_t c : level[2]) {
                        int p = entry_degree(b, c);
                        if (p < 0)
                                continue;
                        std::size_t sz = entry_size(b, c, p);
                        slots.push_back({b, c, p, nvars, sz});
                        nvars += sz;
                }
        if (nvars == 0)
                return s;
        /* constraints: for every a in level 0 and c in level 2, sum over b of d_bc o d_ab = 0 */
        std::vector<QVector> rows;
        for (std::size_t a : level[0])
                for (std::size_t c : level[2]) {
                        std::vector<QVector> cols(nvars);
                        std::size_t width = 0;
                        for (auto &sl : slots) {
                                if (sl.to != c)
                                        continue;
                                const QVector *g = s.entry(a, sl.from);
                                if (!g)
                                        continue;
                                std::size_t q = s.entry_degree(a, sl.from);
                                for (std::size_t k = 0; k < sl.size; k++) {
                                        ExtDual f{static_cast<std::size_t>(sl.p), QVector(sl.size)};
                                        f.coeffs[k] = 1;
                                        ExtDual h = compose_hom(*ctx, s.summands()[a].cone, s.summands()[sl.from].cone,
                                                                s.summands()[c].cone, f, {q, *g});
                                        cols[sl.offset + k] = h.coeffs;
                                        width = std::max(width, h.coeffs.size());
                                }
                        }
                        for (std::size_t r = 0; r < width; r++) {
                                QVector row(nvars);
                                for (std::size_t v = 0; v < nvars; v++)
                                        if (r < cols[v].size())
                                                row[v] = cols[v][r];
                                rows.push_back(row);
                        }
                }
        QMatrix k = rows.empty() ? QMatrix::identity(nvars) : kernel_basis(QMatrix::from_rows(rows, nvars));
        QVector x(nvars);
        for (std::size_t j = 0; j < k.cols(); j++) {
                Rational c = rng.scalar();
                for (std::size_t v = 0; v < nvars; v++)
                        x[v] += c * k(v, j);
        }
        for (auto &sl : slots)
                s.set_entry(sl.from, sl.to, QVector(x.begin() + static_cast<long>(sl.offset), x.begin() + static_cast<long>(sl.offset + sl.size)));
        return s;
}

namespace {

ChainMap combine(const std::vector<ChainMap> &maps, Rng &rng)
{
        ChainMap out{maps[0].source, maps[0].target, {}};
        for (auto &m : maps) {
                Rational c = rng.scalar();
                for (auto &[key, v] : m.comps) {
                        QVector &acc = out.comps[key];
                        acc.resize(v.size());
                        for (std::size_t i = 0; i < v.size(); i++)
                                acc[i] += c * v[i];
                }
        }
        for (auto it = out.comps.begin(); it != out.comps.end();)
                it = is_zero(it->second) ? out.comps.erase(it) : std::next(it);
        return out;
}

const InjComplex &random_object(const ObjectBank &bank, Rng &rng)
{
        switch (rng.range(0, 3)) {
        case 0:
                return rng.pick(bank.costandards);
        case 1:
                return rng.pick(bank.standards);
        case 2:
                return rng.pick(bank.simples);
        default:
                return rng.pick(bank.injectives);
        }
}

} // namespace

ChainMap random_chain_map(const InjComplex &s, const InjComplex &t, Rng &rng)
{
        auto basis = chain_map_basis(s, t);
        if (basis.empty())
                return zero_map(s, t);
        return combine(basis, rng);
}

InjComplex random_complex(const ObjectBank &bank, Rng &rng)
{
        InjComplex s = rng.coin(25) ? random_three_term(bank.ctx, rng) : twist(random_object(bank, rng), rng.range(-2, 2));
        int steps = rng.range(0, 3);
        for (int i = 0; i < steps; i++) {
                switch (rng.range(0, 3)) {
                case 0: {
                        int du = rng.range(-2, 2);
                        s = shift(s, du, du + 2 * rng.range(-1, 1));
                        break;
                }
                case 1:
                        s = direct_sum(s, twist(random_object(bank, rng), rng.range(-2, 2)));
                        break;
                case 2: {
                        const InjComplex &t = random_object(bank, rng);
                        HomResult h = hom_spaces(s, t, true);
                        std::vector<Bidegree> keys;
                        for (auto &[ab, reps] : h.reps)
                                if (!reps.empty())
                                        keys.push_back(ab);
                        if (keys.empty())
                                break;
                        s = mapping_cone(combine(h.reps.at(rng.pick(keys)), rng));
                        break;
                }
                default: {
                        std::vector<std::size_t> perm(s.size());
                        std::iota(perm.begin(), perm.end(), 0);
                        std::shuffle(perm.begin(), perm.end(), rng.engine());
                        s = permute_summands(s, perm);
                }
                }
        }
        return s;
}

std::vector<bool> random_closed_subset(const Fan &fan, Rng &rng)
{
        std::vector<bool> z(fan.size(), false);
        for (FaceId f = 0; f < fan.size(); f++)
                if (rng.coin(30))
                        for (FaceId g = 0; g < fan.size(); g++)
                                if (fan.leq(f, g))
                                        z[g] = true;
        return z;
}

namespace {

/* Runs `body` over contexts round-robin; body returns an empty string on success. */
template <class Body>
PropertyOutcome run_property(const std::string &name, std::size_t cases, std::uint64_t seed, bool with_banks, Body body)
{
        static std::vector<NamedContext> contexts = test_contexts(true);
        static std::vector<std::unique_ptr<ObjectBank>> banks;
        if (with_banks && banks.empty())
                for (auto &c : contexts)
                        banks.push_back(std::make_unique<ObjectBank>(c.ctx));
        PropertyOutcome out{name, 0, 0, ""};
        Rng rng(seed);
        for (std::size_t i = 0; i < cases; i++) {
                std::size_t c = i % contexts.size();
                std::string err;
                try {
                        err = body(contexts[c].ctx, with_banks ? banks[c].get() : nullptr, rng);
                } catch (const std::exception &e) {
                        err = std::string("exception: ") + e.what();
                }
                out.cases++;
                if (!err.empty()) {
                        if (out.failures == 0)
                                out.detail = contexts[c].name + " case " + std::to_string(i) + ": " + err;
                        out.failures++;
                }
        }
        return out;
}

/* Random increasing chain of `len` faces. */
std::vector<FaceId> random_chain(const Fan &fan, std::size_t len, Rng &rng)
{
        std::vector<FaceId> c = {static_cast<FaceId>(rng.range(0, static_cast<int>(fan.size()) - 1))};
        while (c.size() < len) {
                std::vector<FaceId> up;
                for (FaceId g = 0; g < fan.size(); g++)
                        if (fan.leq(c.back(), g))
                                up.push_back(g);
                c.push_back(rng.pick(up));
        }
        return c;
}

ExtDual random_dual(const FanContext &ctx, FaceId a, FaceId b, Rng &rng)
{
        std::size_t d = ctx.rel_dim(a, b);
        auto p = static_cast<std::size_t>(rng.range(0, static_cast<int>(d)));
        return {p, rng.vector(ctx.rel(a, b).graded_dim(p))};
}

} // namespace

PropertyOutcome prop_d_squared(std::size_t cases, std::uint64_t seed)
{
        return run_property("d_squared_zero", cases, seed, true, [](const ContextPtr &, const ObjectBank *bank, Rng &rng) {
                InjComplex s = random_complex(*bank, rng);
                validate(s);
                validate(minimize(s));
                return std::string();
        });
}

PropertyOutcome prop_compose_associativity(std::size_t cases, std::uint64_t seed)
{
        return run_property("compose_associativity", cases, seed, false, [](const ContextPtr &ctx, const ObjectBank *, Rng &rng) {
                auto c = random_chain(ctx->fan(), 4, rng);
                ExtDual h = random_dual(*ctx, c[0], c[1], rng);
                ExtDual g = random_dual(*ctx, c[1], c[2], rng);
                ExtDual f = random_dual(*ctx, c[2], c[3], rng);
                ExtDual left = compose_hom(*ctx, c[0], c[2], c[3], f, compose_hom(*ctx, c[0], c[1], c[2], g, h));
                ExtDual right = compose_hom(*ctx, c[0], c[1], c[3], compose_hom(*ctx, c[1], c[2], c[3], f, g), h);
                if (left.degree != right.degree || left.coeffs != right.coeffs)
                        return std::string("(f g) h != f (g h)");
                ExtDual one{0, {Rational(1)}};
                ExtDual fl = compose_hom(*ctx, c[2], c[2], c[3], f, one);
                ExtDual fr = compose_hom(*ctx, c[2], c[3], c[3], one, f);
                if (fl.coeffs != f.coeffs || fr.coeffs != f.coeffs)
                        return std::string("unit law fails");
                return std::string();
        });
}

PropertyOutcome prop_wedge_pairing(std::size_t cases, std::uint64_t seed)
{
        return run_property("wedge_pairing_duality", cases, seed, false, [](const ContextPtr &ctx, const ObjectBank *, Rng &rng) {
                auto c = random_chain(ctx->fan(), 3, rng); /* rho <= tau <= sigma */
                const ExtAlgebra &outer = ctx->rel(c[1], c[2]), &inner = ctx->rel(c[0], c[1]), &whole = ctx->rel(c[0], c[2]);
                ExtDual f = random_dual(*ctx, c[1], c[2], rng);
                ExtDual g = random_dual(*ctx, c[0], c[1], rng);
                QVector x = rng.vector(f.coeffs.size()), y = rng.vector(g.coeffs.size());
                Multivector xm, ym;
                for (std::size_t i = 0; i < x.size(); i++)
                        for (auto &[k, v] : mv_monomial(outer.basis(), outer.monomials(f.degree)[i]))
                                xm[k] += x[i] * v;
                for (std::size_t i = 0; i < y.size(); i++)
                        for (auto &[k, v] : mv_monomial(inner.basis(), inner.monomials(g.degree)[i]))
                                ym[k] += y[i] * v;
                QVector xy = mv_coordinates(whole, f.degree + g.degree, mv_wedge(xm, ym));
                ExtDual fg = compose_hom(*ctx, c[0], c[1], c[2], f, g);
                if (dot(fg.coeffs, xy) != dot(f.coeffs, x) * dot(g.coeffs, y))
                        return std::string("<f o g, x ^ y> != <f, x><g, y>");
                return std::string();
        });
}

PropertyOutcome prop_shift_group(std::size_t cases, std::uint64_t seed)
{
        return run_property("shift_group_laws", cases, seed, true, [](const ContextPtr &, const ObjectBank *bank, Rng &rng) {
                InjComplex s = random_complex(*bank, rng);
                int a = rng.range(-3, 3), c = rng.range(-3, 3);
                int b = a + 2 * rng.range(-2, 2), d = c + 2 * rng.range(-2, 2);
                if (!same_complex(shift(shift(s, a, b), c, d), shift(s, a + c, b + d)))
                        return std::string("shift(shift(S,x),y) != shift(S,x+y)");
                if (!same_complex(shift(shift(s, a, b), -a, -b), s) || !same_complex(shift(s, 0, 0), s))
                        return std::string("inverse or identity law fails");
                int k = rng.range(-4, 4), l = rng.range(-4, 4);
                if (!same_complex(twist(twist(s, k), l), twist(s, k + l)))
                        return std::string("twist(twist(S,k),l) != twist(S,k+l)");
                if (!same_complex(shift(s, 2, 0), shift(shift(s, 1, 1), 1, -1)))
                        return std::string("[1] is not a composite of half shifts");
                validate(shift(s, a, b));
                return std::string();
        });
}

PropertyOutcome prop_open_closed_vanishing(std::size_t cases, std::uint64_t seed)
{
        return run_property("j_star_i_lower_star_zero", cases, seed, true, [](const ContextPtr &ctx, const ObjectBank *bank, Rng &rng) {
                const Fan &fan = ctx->fan();
                std::vector<bool> z = random_closed_subset(fan, rng), u(fan.size()), all(fan.size(), true);
                for (FaceId f = 0; f < fan.size(); f++)
                        u[f] = !z[f];
                InjComplex sz = corestrict_closed(random_complex(*bank, rng), z);
                InjComplex pushed = extend_closed(sz, all);
                validate(pushed);
                InjComplex r = restrict_open(pushed, u);
                if (r.size() != 0)
                        return std::string("j^* i_* S has ") + std::to_string(r.size()) + " summands";
                return std::string();
        });
}

PropertyOutcome prop_closed_roundtrip(std::size_t cases, std::uint64_t seed)
{
        return run_property("i_upper_shriek_i_lower_star_identity", cases, seed, true,
                            [](const ContextPtr &ctx, const ObjectBank *bank, Rng &rng) {
                                    const Fan &fan = ctx->fan();
                                    std::vector<bool> z = random_closed_subset(fan, rng), all(fan.size(), true);
                                    InjComplex sz = corestrict_closed(random_complex(*bank, rng), z);
                                    if (!same_complex(corestrict_closed(extend_closed(sz, all), z), sz))
                                            return std::string("i^! i_* S != S");
                                    return std::string();
                            });
}

PropertyOutcome prop_gamma_twist(std::size_t cases, std::uint64_t seed)
{
        return run_property("gamma_commutes_with_twist", cases, seed, true, [](const ContextPtr &ctx, const ObjectBank *bank, Rng &rng) {
                InjComplex s = random_complex(*bank, rng);
                int k = rng.range(-4, 4);
                FaceId f = static_cast<FaceId>(rng.range(0, static_cast<int>(ctx->fan().size()) - 1));
                InjComplex t = twist(s, k);
                if (gamma_stalk(t, f) != translate(gamma_stalk(s, f), -k, k))
                        return std::string("stalk does not translate");
                if (gamma_costalk(t, f) != translate(gamma_costalk(s, f), -k, k))
                        return std::string("costalk does not translate");
                return std::string();
        });
}

PropertyOutcome prop_minimize_homs(std::size_t cases, std::uint64_t seed)
{
        return run_property("minimize_preserves_homs", cases, seed, true, [](const ContextPtr &ctx, const ObjectBank *bank, Rng &rng) {
                InjComplex s = random_complex(*bank, rng);
                const InjComplex &x = rng.pick(bank->costandards);
                s = direct_sum(s, mapping_cone(identity_map(x)));
                InjComplex m = minimize(s);
                if (!same_complex(minimize(m), m))
                        return std::string("minimize is not idempotent");
                auto nonzero = [](BigradedDims d) {
                        std::erase_if(d, [](const auto &kv) { return kv.second == 0; });
                        return d;
                };
                for (FaceId r = 0; r < ctx->fan().size(); r++)
                        if (nonzero(hom_spaces(s, bank->costandards[r]).dims) != nonzero(hom_spaces(m, bank->costandards[r]).dims))
                                return std::string("hom dims to a costandard changed");
                for (FaceId f = 0; f < ctx->fan().size(); f++)
                        if (gamma_stalk(s, f) != gamma_stalk(m, f) || gamma_costalk(s, f) != gamma_costalk(m, f))
                                return std::string("Gamma dims changed");
                return std::string();
        });
}

} // namespace testsup
