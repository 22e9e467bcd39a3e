#include "commands.hpp"

#include "kdual/equivariant.hpp"
#include "kdual/koszul.hpp"
#include "kdual/parallel.hpp"
#include "kdual/perverse.hpp"

#include <chrono>

namespace kdual::cli {

using nlohmann::json;

namespace {

struct Input {
        std::string text;
        FanFile file;
        LoadedFan loaded;
};

Input load(const std::string &path)
{
        Input in;
        in.text = read_text(path);
        in.file = parse_fan_file(in.text);
        in.loaded = load_fan(in.file);
        return in;
}

json header(const std::string &echo, const std::string &path, const Input &in)
{
        json r;
        r["command"] = echo;
        r["input"] = path;
        r["input_hash"] = "fnv1a64:" + fnv1a_hex(in.text);
        r["fan"] = in.file.name;
        return r;
}

Outcome input_failure(const std::string &echo, const std::string &msg)
{
        return {{{"command", echo}, {"status", "input_error"}, {"error", msg}}, 2};
}

json face_json(const Fan &fan, FaceId f)
{
        return {{"id", f}, {"dim", fan.face(f).dim}, {"rays", fan.face(f).rays}};
}

json gamma_tables(const InjComplex &s)
{
        json out = json::array();
        for (FaceId f = 0; f < s.fan().size(); f++) {
                if (!s.present()[f])
                        continue;
                out.push_back({{"face", f}, {"stalk", dims_json(gamma_stalk(s, f))}, {"costalk", dims_json(gamma_costalk(s, f))}});
        }
        return out;
}

json trace_json(const ConstructionTrace &t)
{
        json kept = json::array();
        for (auto &k : t.kept)
                kept.push_back(dims_json(k));
        return {{"order", t.order}, {"kept", kept}, {"sizes", t.sizes}};
}

json status(bool ok)
{
        return ok ? "pass" : "fail";
}

bool is_single_cone(const Fan &fan)
{
        auto m = fan.maximal();
        return m.size() == 1 && fan.face(m[0]).dim == fan.ambient_dim();
}

} // namespace

std::string render(const json &report)
{
        return report.dump(2) + "\n";
}

FaceId parse_face(const Fan &fan, const std::string &sel)
{
        if (sel == "o")
                return fan.zero_face();
        if (sel == "top")
                return fan.top();
        if (sel.rfind("rays:", 0) == 0) {
                std::vector<std::size_t> idx;
                std::string rest = sel.substr(5);
                std::size_t pos = 0;
                while (pos < rest.size()) {
                        std::size_t comma = rest.find(',', pos);
                        std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                        try {
                                idx.push_back(std::stoul(tok));
                        } catch (const std::exception &) {
                                throw InputError("bad ray index in face sel: " + tok);
                        }
                        if (comma == std::string::npos)
                                break;
                        pos = comma + 1;
                }
                auto f = fan.find(idx);
                if (!f)
                        throw InputError("ray set is not a face: " + sel);
                return *f;
        }
        std::size_t used = 0;
        unsigned long v = 0;
        try {
                v = std::stoul(sel, &used);
        } catch (const std::exception &) {
                used = 0;
        }
        if (used != sel.size() || sel.empty())
                throw InputError("face must be o, top, an index, or rays:i,j,...: " + sel);
        if (v >= fan.size())
                throw InputError("face index out of range: " + sel);
        return v;
}

Outcome cmd_fan_info(const std::string &path)
{
        std::string echo = "fan info " + path;
        try {
                Input in = load(path);
                const Fan &fan = *in.loaded.fan;
                json r = header(echo, path, in);
                r["ambient_dim"] = fan.ambient_dim();
                r["faces_by_dim"] = fan.counts_by_dim();
                json rays = json::array();
                for (auto &v : fan.rays()) {
                        json a = json::array();
                        for (auto &x : v)
                                a.push_back(rational_json(x));
                        rays.push_back(a);
                }
                r["rays"] = rays;
                json faces = json::array();
                for (FaceId f = 0; f < fan.size(); f++)
                        faces.push_back(face_json(fan, f));
                r["faces"] = faces;
                r["maximal"] = fan.maximal();
                json comp = json::array();
                for (FaceId f = 0; f < fan.size(); f++)
                        comp.push_back({{"face", f}, {"dim", in.loaded.ctx->completion().phi(f).rows()}});
                r["completion"] = {{"kind", in.file.completion ? "explicit" : "orthogonal"}, {"faces", comp}};
                r["status"] = "pass";
                return {r, 0};
        } catch (const InputError &e) {
                return input_failure(echo, e.what());
        } catch (const FanError &e) {
                return input_failure(echo, e.what());
        }
}

Outcome cmd_fan_dualize(const std::string &path)
{
        std::string echo = "fan dualize " + path;
        try {
                Input in = load(path);
                const Fan &fan = *in.loaded.fan;
                if (!is_single_cone(fan))
                        throw InputError("dualize needs the face lattice of one full-dimensional cone");
                DualityContext dc = make_duality(in.loaded.ctx);
                const Fan &dual = dc.dual->fan();
                json r = header(echo, path, in);
                r["faces_by_dim"] = fan.counts_by_dim();
                r["dual_faces_by_dim"] = dual.counts_by_dim();
                json perp = json::array();
                for (FaceId f = 0; f < fan.size(); f++)
                        perp.push_back({{"face", face_json(fan, f)}, {"perp", face_json(dual, dc.perp[f])}});
                r["perp"] = perp;
                std::string name = in.file.name.empty() ? "dual" : in.file.name + "_dual";
                r["dual"] = fan_file_json(fan_to_file(dual, dc.dual->completion(), name));
                r["status"] = "pass";
                return {r, 0};
        } catch (const InputError &e) {
                return input_failure(echo, e.what());
        } catch (const FanError &e) {
                return input_failure(echo, e.what());
        }
}

Outcome cmd_build(const std::string &path, const BuildArgs &args)
{
        std::string echo = "build " + args.object + " " + path + " --face " + args.face + " --twist " +
                           std::to_string(args.twist) + " --variant " + args.variant;
        Input in;
        FaceId face = 0;
        Truncation variant = Truncation::tau;
        try {
                in = load(path);
                face = parse_face(*in.loaded.fan, args.face);
                if (args.variant == "tau_prime")
                        variant = Truncation::tau_prime;
                else if (args.variant != "tau")
                        throw InputError("variant must be tau or tau_prime");
                if (args.object != "costandard" && args.object != "standard" && args.object != "simple" &&
                    args.object != "injective")
                        throw InputError("unknown object " + args.object);
        } catch (const InputError &e) {
                return input_failure(echo, e.what());
        } catch (const FanError &e) {
                return input_failure(echo, e.what());
        }
        const ContextPtr &ctx = in.loaded.ctx;
        const Fan &fan = ctx->fan();
        json r = header(echo, path, in);
        r["object"] = args.object;
        r["face"] = face_json(fan, face);
        r["twist"] = args.twist;
        json checks = json::array();
        bool ok = true;
        try {
                InjComplex s;
                if (args.object == "costandard") {
                        s = costandard(ctx, face);
                } else if (args.object == "standard") {
                        s = standard(ctx, face);
                        bool vanish = true;
                        for (FaceId f = 0; f < fan.size(); f++)
                                if (f != face && !gamma_stalk(s, f).empty())
                                        vanish = false;
                        checks.push_back({{"name", "stalk_vanishing_off_face"}, {"status", status(vanish)}});
                        ok = ok && vanish;
                } else if (args.object == "simple") {
                        BuildResult b = simple(ctx, face, variant);
                        s = b.complex;
                        r["trace"] = trace_json(b.trace);
                } else {
                        BuildResult b = injective_hull(ctx, face);
                        s = b.complex;
                        r["trace"] = trace_json(b.trace);
                }
                s = minimize(twist(s, args.twist));
                validate(s);
                r["complex"] = complex_json(s);
                r["gamma"] = gamma_tables(s);
                Perversity p = perversity_check(s);
                r["perversity"] = {{"le0", p.le0}, {"ge0", p.ge0}, {"perverse", p.perverse()}};
                checks.push_back({{"name", "perverse"}, {"status", status(p.perverse())}});
                ok = ok && p.perverse();
        } catch (const std::exception &e) {
                r["error"] = e.what();
                ok = false;
        }
        r["checks"] = checks;
        r["status"] = status(ok);
        return {r, ok ? 0 : 1};
}

namespace {

json check_purity(const ContextPtr &ctx, unsigned jobs, bool &ok)
{
        const Fan &fan = ctx->fan();
        json items = json::array();
        std::vector<json> per(fan.size());
        parallel_for(fan.size(), jobs, [&](std::size_t t) {
                InjComplex l = simple(ctx, t).complex;
                bool diag = true;
                for (FaceId s = 0; s < fan.size(); s++)
                        diag = diag && is_diagonal(gamma_stalk(l, s)) && is_diagonal(gamma_costalk(l, s));
                bool perv = perversity_check(l).perverse();
                per[t] = {{"name", "purity"}, {"face", t}, {"diagonal", diag}, {"perverse", perv}, {"status", status(diag && perv)}};
        });
        for (auto &p : per) {
                ok = ok && p["status"] == "pass";
                items.push_back(p);
        }
        return items;
}

json check_koszulity(const ContextPtr &ctx, unsigned jobs, bool &ok)
{
        json items = json::array();
        auto table = koszul_table(ctx, jobs);
        bool diag = true;
        json tj = json::array();
        for (auto &e : table) {
                for (auto &[ab, d] : e.dims)
                        if (d && ab.u != ab.v)
                                diag = false;
                tj.push_back({{"tau", e.tau}, {"rho", e.rho}, {"dims", dims_json(e.dims)}});
        }
        items.push_back({{"name", "koszul_offdiagonal_zero"}, {"status", status(diag)}, {"table", tj}});
        FaceId o = ctx->fan().zero_face();
        for (auto &e : table)
                if (e.tau == o && e.rho == o) {
                        auto it = e.dims.find({2, 2});
                        items.push_back({{"name", "hom_1_1_L_o_L_o"}, {"value", it == e.dims.end() ? 0 : it->second}});
                }
        ok = ok && diag;
        return items;
}

json check_duality(const ContextPtr &ctx, const CheckArgs &args, bool &ok)
{
        json items = json::array();
        DualityContext dc = make_duality(ctx);
        VerifyOptions vo;
        vo.jobs = args.jobs;
        DualityReport rep = verify_duality(dc, vo);
        for (auto &c : rep.simple_to_injective)
                items.push_back({{"name", "kappa_simple_is_injective"}, {"face", c.face}, {"partner", c.partner},
                                 {"status", status(c.ok)}, {"detail", c.detail}});
        for (auto &c : rep.injective_to_simple)
                items.push_back({{"name", "kappa_injective_is_simple"}, {"face", c.face}, {"partner", c.partner},
                                 {"status", status(c.ok)}, {"detail", c.detail}});
        items.push_back({{"name", "koszul_offdiagonal_zero"}, {"status", status(rep.koszul)}});
        bool ring = true;
        for (auto &c : rep.ext_ring)
                ring = ring && c.ok;
        items.push_back({{"name", "end_ext_ring_identity"}, {"pairs", rep.ext_ring.size()}, {"status", status(ring)}});

        const Fan &fan = ctx->fan();
        int range = args.twist_range >= 0 ? args.twist_range : 2 * static_cast<int>(fan.ambient_dim());
        std::vector<InjComplex> l(fan.size()), inj(fan.size());
        parallel_for(2 * fan.size(), args.jobs, [&](std::size_t i) {
                if (i < fan.size())
                        l[i] = simple(ctx, i).complex;
                else
                        inj[i - fan.size()] = injective_hull(ctx, i - fan.size()).complex;
        });
        std::vector<int> bad(fan.size(), 0);
        parallel_for(fan.size(), args.jobs, [&](std::size_t t) {
                for (FaceId rho = 0; rho < fan.size(); rho++)
                        for (auto &[ab, d] : hom_spaces(l[rho], inj[t]).dims)
                                if (d && ab.u + ab.v == 2 && std::abs(ab.v) <= range)
                                        bad[t]++;
        });
        for (FaceId t = 0; t < fan.size(); t++)
                items.push_back({{"name", "injective_ext1_vanishing"}, {"face", t}, {"twist_range", range},
                                 {"status", status(bad[t] == 0)}});
        for (auto &it : items)
                if (it.contains("status"))
                        ok = ok && it["status"] == "pass";
        return items;
}

json check_bbfk(const ContextPtr &ctx, unsigned jobs, bool &ok)
{
        const Fan &fan = ctx->fan();
        std::vector<json> per(fan.size());
        parallel_for(fan.size(), jobs, [&](std::size_t t) {
                PurityReport rep = crosscheck_purity(ctx, t);
                ASheaf sheaf = minimal_extension_sheaf(ctx->fan_ptr(), t);
                bool g_ok = true;
                int ct = -static_cast<int>(fan.codim(t));
                for (FaceId s = 0; s < fan.size(); s++) {
                        if (!fan.leq(t, s))
                                continue;
                        GradedDims want;
                        auto g = g_interval(fan, t, s);
                        for (std::size_t i = 0; i < g.size(); i++)
                                if (g[i])
                                        want[ct + 2 * static_cast<int>(i)] = static_cast<std::size_t>(g[i]);
                        if (local_ic_dims(sheaf, s).stalk != want)
                                g_ok = false;
                }
                json mism = json::array();
                for (auto &it : rep.items)
                        if (!it.diagonal || !it.matches)
                                mism.push_back(it.sigma);
                per[t] = {{"name", "bbfk_crosscheck"}, {"face", t}, {"g_vector_match", g_ok}, {"mismatched_cones", mism},
                          {"status", status(rep.passed() && g_ok)}};
        });
        json items = json::array();
        for (auto &p : per) {
                ok = ok && p["status"] == "pass";
                items.push_back(p);
        }
        return items;
}

} // namespace

Outcome cmd_check(const std::string &path, const CheckArgs &args)
{
        std::string echo = "check " + args.kind + " " + path;
        if (args.twist_range >= 0)
                echo += " --twist-range " + std::to_string(args.twist_range);
        Input in;
        try {
                in = load(path);
                if (args.kind != "purity" && args.kind != "koszulity" && args.kind != "duality" && args.kind != "bbfk" &&
                    args.kind != "all")
                        throw InputError("unknown check " + args.kind);
                bool needs_cone = args.kind == "duality" || args.kind == "all";
                if (needs_cone && !is_single_cone(*in.loaded.fan))
                        throw InputError("duality needs the face lattice of one full-dimensional cone");
        } catch (const InputError &e) {
                return input_failure(echo, e.what());
        } catch (const FanError &e) {
                return input_failure(echo, e.what());
        }
        auto start = std::chrono::steady_clock::now();
        const ContextPtr &ctx = in.loaded.ctx;
        json r = header(echo, path, in);
        json items = json::array();
        bool ok = true;
        auto add = [&](const json &more) {
                for (auto &x : more)
                        items.push_back(x);
        };
        try {
                bool all = args.kind == "all";
                if (all || args.kind == "purity")
                        add(check_purity(ctx, args.jobs, ok));
                if (all || args.kind == "koszulity")
                        add(check_koszulity(ctx, args.jobs, ok));
                if (all || args.kind == "duality")
                        add(check_duality(ctx, args, ok));
                if (all || args.kind == "bbfk")
                        add(check_bbfk(ctx, args.jobs, ok));
        } catch (const std::exception &e) {
                r["error"] = e.what();
                ok = false;
        }
        r["checks"] = items;
        r["status"] = status(ok);
        if (args.timing)
                r["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        return {r, ok ? 0 : 1};
}

} // namespace kdual::cli
