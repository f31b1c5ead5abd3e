#include "commands.hpp"
#include "config.hpp"

#include "pfaffnet/errors.hpp"
#include "pfaffnet/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#ifndef PFAFFNET_VERSION
#define PFAFFNET_VERSION "0.0.0"
#endif

namespace {

using pfaffnet::json;
using namespace pfaffnet::cli;

enum Exit { kOk = 0, kNonconformant = 1, kUsage = 2, kDomain = 3 };

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void write_csv(std::ostream& out, const Report& rep) {
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
        out << (i ? "," : "") << csv_cell(rep.columns[i]);
    out << '\n';
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Flags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> seeds;
    std::optional<unsigned> threads;
    std::optional<std::string> mode;
    std::optional<int> resolution;
    std::optional<double> tol;
    std::optional<double> epsilon;
};

using Command = std::function<Report(const json&, const RunOptions&)>;

int run(const std::string& name, const Command& cmd, const Flags& f) {
    json config = pfaffnet::read_json_file(f.config_path);
    if (!config.is_object())
        throw pfaffnet::SchemaError("config must be a JSON object");
    // relative family files resolve against the config's directory
    if (config.contains("family") && config["family"].is_object() && config["family"].contains("path") &&
        config["family"]["path"].is_string()) {
        const std::filesystem::path p = config["family"]["path"].get<std::string>();
        if (p.is_relative())
            config["family"]["path"] = (std::filesystem::path(f.config_path).parent_path() / p).lexically_normal().string();
    }
    if (f.seed) {
        config.erase("seeds");
        config["seed"] = *f.seed;
    }
    if (f.seeds) {
        parse_seed_range(*f.seeds);
        config.erase("seed");
        config["seeds"] = *f.seeds;
    }
    if (f.mode)
        config["mode"] = *f.mode;
    if (f.resolution)
        config["resolution"] = *f.resolution;
    if (f.tol)
        config["tol"] = *f.tol;
    if (f.epsilon)
        config["epsilon"] = *f.epsilon;

    RunOptions opts;
    opts.threads = f.threads ? *f.threads : pfaffnet::default_thread_count();
    if (opts.threads == 0)
        opts.threads = pfaffnet::default_thread_count();

    const Report rep = cmd(config, opts);
    if (f.out.empty()) {
        write_csv(std::cout, rep);
    } else {
        std::ofstream csv(f.out + ".csv");
        if (!csv)
            throw pfaffnet::SchemaError("cannot write '" + f.out + ".csv'");
        write_csv(csv, rep);
        json side;
        side["tool"] = "pfaffnet";
        side["version"] = PFAFFNET_VERSION;
        side["command"] = name;
        side["timestamp"] = utc_timestamp();
        side["config"] = rep.config;
        side["summary"] = rep.summary;
        side["verdict"] = rep.conformant ? "conformant" : "nonconformant";
        std::ofstream js(f.out + ".json");
        if (!js)
            throw pfaffnet::SchemaError("cannot write '" + f.out + ".json'");
        js << side.dump(2) << '\n';
    }
    if (!rep.conformant)
        std::cerr << "pfaffnet " << name << ": nonconformant result\n";
    return rep.conformant ? kOk : kNonconformant;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pfaffian complexity tools for Riccati-activation networks", "pfaffnet"};
    app.set_version_flag("--version", PFAFFNET_VERSION);
    app.require_subcommand(1);

    Flags f;
    const std::map<std::string, Command> commands{
        {"format", cmd_format},         {"bound", cmd_bound}, {"verify-chain", cmd_verify_chain},
        {"zeros", cmd_zeros},           {"betti", cmd_betti}, {"rankdrop", cmd_rankdrop},
    };
    const std::map<std::string, std::string> help{
        {"format", "Pfaffian format (d, R, alpha, beta) of an architecture"},
        {"bound", "Exact zero, Betti, Gabrielov-Vorobjov and rank-drop bounds"},
        {"verify-chain", "Check the chain certificates against finite differences and degree bounds"},
        {"zeros", "Count zeros of random one-input networks"},
        {"betti", "Betti numbers of superlevel sets on a cubical grid"},
        {"rankdrop", "Sample the bracket rank-drop locus"},
    };

    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", f.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", f.out, "Write PREFIX.csv and PREFIX.json instead of CSV on stdout");
        if (name != "format" && name != "bound") {
            sub->add_option("--seed", f.seed, "Single seed");
            sub->add_option("--seeds", f.seeds, "Seed range N..M");
            sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
        }
        if (name == "bound" || name == "rankdrop")
            sub->add_option("--mode", f.mode, "Bracket enumeration")->check(CLI::IsMember({"hall", "all-trees"}));
        if (name == "betti" || name == "rankdrop")
            sub->add_option("--resolution", f.resolution, "Cells per axis")->check(CLI::PositiveNumber);
        if (name == "verify-chain" || name == "rankdrop")
            sub->add_option("--tol", f.tol, "Tolerance")->check(CLI::PositiveNumber);
        if (name == "rankdrop")
            sub->add_option("--epsilon", f.epsilon, "Fixed threshold for the minor criterion")
                ->check(CLI::NonNegativeNumber);
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    for (const auto& [name, sub] : subs) {
        if (!sub->parsed())
            continue;
        try {
            return run(name, commands.at(name), f);
        } catch (const pfaffnet::DomainError& e) {
            std::cerr << "pfaffnet " << name << ": domain error: " << e.what() << '\n';
            return kDomain;
        } catch (const pfaffnet::CellEvaluationError& e) {
            std::cerr << "pfaffnet " << name << ": domain error: " << e.what() << '\n';
            return kDomain;
        } catch (const pfaffnet::SchemaError& e) {
            std::cerr << "pfaffnet " << name << ": config error: " << e.what() << '\n';
            return kUsage;
        } catch (const pfaffnet::BudgetError& e) {
            std::cerr << "pfaffnet " << name << ": budget exceeded: " << e.what() << '\n';
            return kUsage;
        } catch (const pfaffnet::ShapeError& e) {
            std::cerr << "pfaffnet " << name << ": shape error: " << e.what() << '\n';
            return kUsage;
        } catch (const std::exception& e) {
            std::cerr << "pfaffnet " << name << ": error: " << e.what() << '\n';
            return kUsage;
        }
    }
    return kUsage;
}
