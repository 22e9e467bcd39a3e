#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace kdual::cli;

int main(int argc, char **argv)
{
        CLI::App app{"kdual: Koszul duality for combinatorial sheaves on fans"};
        app.require_subcommand(1);
        std::string output;
        app.add_option("-o,--output", output, "write the report here instead of stdout");

        std::string fan_path, fan_action;
        auto *fan = app.add_subcommand("fan", "inspect or dualize a fan file");
        fan->add_option("action", fan_action, "info or dualize")->required()->check(CLI::IsMember({"info", "dualize"}));
        fan->add_option("path", fan_path, "fan JSON file")->required();

        BuildArgs build_args;
        std::string build_path;
        auto *build = app.add_subcommand("build", "construct a perverse object");
        build->add_option("object", build_args.object, "costandard, standard, simple or injective")
                ->required()
                ->check(CLI::IsMember({"costandard", "standard", "simple", "injective"}));
        build->add_option("path", build_path, "fan JSON file")->required();
        build->add_option("--face", build_args.face, "o, top, a face index, or rays:i,j,...");
        build->add_option("--twist", build_args.twist, "apply the twist <k>");
        build->add_option("--variant", build_args.variant, "truncation used by simple: tau or tau_prime")
                ->check(CLI::IsMember({"tau", "tau_prime"}));

        CheckArgs check_args;
        std::string check_path;
        auto *check = app.add_subcommand("check", "run acceptance checks on a fan");
        check->add_option("kind", check_args.kind, "purity, koszulity, duality, bbfk or all")
                ->required()
                ->check(CLI::IsMember({"purity", "koszulity", "duality", "bbfk", "all"}));
        check->add_option("path", check_path, "fan JSON file")->required();
        check->add_option("--jobs", check_args.jobs, "worker threads for per-face checks")->check(CLI::Range(1u, 256u));
        check->add_option("--twist-range", check_args.twist_range, "largest |k| for the injective Ext^1 check (default 2n)");
        check->add_flag("--timing", check_args.timing, "include wall-clock timing in the report");

        try {
                app.parse(argc, argv);
        } catch (const CLI::ParseError &e) {
                int rc = app.exit(e);
                return rc == 0 ? 0 : 2;
        }

        Outcome out;
        if (*fan)
                out = fan_action == "info" ? cmd_fan_info(fan_path) : cmd_fan_dualize(fan_path);
        else if (*build)
                out = cmd_build(build_path, build_args);
        else
                out = cmd_check(check_path, check_args);

        std::string text = render(out.report);
        if (output.empty()) {
                std::cout << text;
        } else {
                std::ofstream f(output, std::ios::binary);
                if (!f) {
                        std::cerr << "cannot write " << output << "\n";
                        return 2;
                }
                f << text;
        }
        if (out.exit_code == 2 && out.report.contains("error"))
                std::cerr << "error: " << out.report["error"].get<std::string>() << "\n";
        return out.exit_code;
}
