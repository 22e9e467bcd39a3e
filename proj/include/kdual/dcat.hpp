#pragma once

#include "kdual/exterior.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kdual {

struct DcatError : std::runtime_error {
        std::string kind;
        DcatError(std::string k, const std::string &msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

/* Doubled bidegree: u = 2i (complex degree), v = 2j (grading). */
struct Bidegree {
        int u = 0, v = 0;
        auto operator<=>(const Bidegree &) const = default;
};

using BigradedDims = std::map<Bidegree, std::size_t>;

/* J_cone placed in complex degree u/2 with its generator in grading v/2. */
struct Summand {
        FaceId cone = 0;
        Bidegree deg;
        auto operator<=>(const Summand &) const = default;
};

using EntryMap = std::map<std::pair<std::size_t, std::size_t>, QVector>;

class InjComplex {
public:
        InjComplex() = default;
        InjComplex(ContextPtr ctx, std::vector<bool> present);
        static InjComplex empty(ContextPtr ctx); /* over the whole fan */

        const FanContext &ctx() const { return *ctx_; }
        ContextPtr ctx_ptr() const { return ctx_; }
        const std::vector<bool> &present() const { return present_; }
        const Fan &fan() const { return ctx_->fan(); }
        std::shared_ptr<const Fan> fan_ptr() const { return ctx_->fan_ptr(); }

        const std::vector<Summand> &summands() const { return summands_; }
        const EntryMap &entries() const { return entries_; }
        std::size_t size() const { return summands_.size(); }

        std::size_t add_summand(FaceId cone, Bidegree deg);
        void set_entry(std::size_t from, std::size_t to, QVector coeffs); /* zero vectors are dropped */
        const QVector *entry(std::size_t from, std::size_t to) const;
        std::size_t entry_degree(std::size_t from, std::size_t to) const;

private:
        ContextPtr ctx_;
        std::vector<bool> present_;
        std::vector<Summand> summands_;
        EntryMap entries_;
};

/* Degree (0,0) map; components from source summand s to target summand t with equal u. */
struct ChainMap {
        InjComplex source, target;
        EntryMap comps;
};

void validate(const InjComplex &s);               /* throws DcatError */
void validate_chain_map(const ChainMap &f);        /* throws DcatError NotChainMap */

InjComplex shift(const InjComplex &s, int du, int dv); /* S[du/2]{dv/2}, doubled arguments */
InjComplex twist(const InjComplex &s, int k);         /* S<k> = [k/2]{-k/2} */
InjComplex direct_sum(const InjComplex &a, const InjComplex &b);
InjComplex mapping_cone(const ChainMap &f);
ChainMap identity_map(const InjComplex &s);
ChainMap compose_maps(const ChainMap &g, const ChainMap &f); /* g o f */
ChainMap zero_map(const InjComplex &s, const InjComplex &t);

/* Restriction and extension functors for subsets of the context fan. */
InjComplex restrict_open(const InjComplex &s, const std::vector<bool> &open);
InjComplex extend_closed(const InjComplex &s, const std::vector<bool> &larger);
InjComplex corestrict_closed(const InjComplex &s, const std::vector<bool> &closed);
InjComplex stalk_restrict(const InjComplex &s, FaceId sigma); /* over the one-cone quasifan {sigma} */

BigradedDims gamma_stalk(const InjComplex &s, FaceId sigma);
BigradedDims gamma_costalk(const InjComplex &s, FaceId sigma);
/* Cohomology of a complex whose entries are all scalars between summands of one cone. */
BigradedDims scalar_cohomology(const InjComplex &s);

struct HomResult {
        std::map<Bidegree, std::size_t> dims; /* key (a,b) doubled: Hom^a_b */
        std::map<Bidegree, std::vector<ChainMap>> reps; /* maps S -> T[a]{b} */
};

HomResult hom_spaces(const InjComplex &s, const InjComplex &t, bool with_reps = false);
std::size_t hom_dim(const InjComplex &s, const InjComplex &t, Bidegree ab);
std::vector<ChainMap> hom_reps(const InjComplex &s, const InjComplex &t, Bidegree ab);
/* Basis of degree-0 cocycles S -> T (all chain maps, not modulo homotopy). */
std::vector<ChainMap> chain_map_basis(const InjComplex &s, const InjComplex &t);

InjComplex minimize(const InjComplex &s);

struct IsoResult {
        bool isomorphic = false;
        std::string reason;
        std::optional<ChainMap> witness;
};
IsoResult is_isomorphic(const InjComplex &s, const InjComplex &t);

struct Perversity {
        bool le0 = true, ge0 = true;
        bool perverse() const { return le0 && ge0; }
};
Perversity perversity_check(const InjComplex &s);

/* Split a complex over {sigma} at perverse level `level`: (S_{<=level}, S_{>=level+1}). */
std::pair<InjComplex, InjComplex> t_truncate_point(const InjComplex &s, int level = 0);

std::vector<Summand> sorted_summands(const InjComplex &s);
std::string describe(const InjComplex &s);

} // namespace kdual
