// fbasis command line driver. Talks to the shared library exclusively
// through the C interface in fbasis/fbasis.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbasis/fbasis.h"

namespace {

struct CString {
    char* ptr = nullptr;
    ~CString() { fb_string_free(ptr); }
};

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out;
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "fbasis: cannot open output file '" << out_path << "'\n";
        return 2;
    }
    f << text;
    return 0;
}

struct SuiteOptions {
    std::string model = "del-pezzo";
    std::uint64_t seed = 0;
    int lmax = 4;
    double tol = 0;
    int instances = 100;
    int dwpf_seeds = 10;
    std::string out_path;
    std::string format = "json";
    std::string custom_table_path;
};

void add_suite_options(CLI::App* cmd, SuiteOptions& opt) {
    cmd->add_option("--model", opt.model, "weight model: del-pezzo | perk-schultz | custom");
    cmd->add_option("--seed", opt.seed, "base PRNG seed (splitmix64)");
    cmd->add_option("--lmax", opt.lmax, "largest chain length exercised")->check(CLI::Range(1, 6));
    cmd->add_option("--tol", opt.tol, "relative tolerance override (0 keeps defaults)");
    cmd->add_option("--instances", opt.instances, "weight relation instances");
    cmd->add_option("--dwpf-seeds", opt.dwpf_seeds, "seeds per DWPF agreement case");
    cmd->add_option("--out", opt.out_path, "report file (stdout when omitted)");
    cmd->add_option("--format", opt.format, "report format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--custom-table", opt.custom_table_path, "weight-table document (model=custom)");
}

int run_suite_command(const std::string& suite, const SuiteOptions& opt) {
    std::ostringstream cfg;
    cfg << "{\"suite\":\"" << suite << "\",\"model\":\"" << json_escape(opt.model)
        << "\",\"seed\":" << opt.seed
        << ",\"lmax\":" << opt.lmax << ",\"tol\":" << opt.tol
        << ",\"instances\":" << opt.instances << ",\"dwpf_seeds\":" << opt.dwpf_seeds
        << ",\"format\":\"" << opt.format << "\"";
    if (!opt.custom_table_path.empty()) {
        std::ifstream f(opt.custom_table_path, std::ios::binary);
        if (!f) {
            std::cerr << "fbasis: cannot read table '" << opt.custom_table_path << "'\n";
            return 2;
        }
        std::ostringstream body;
        body << f.rdbuf();
        cfg << ",\"custom_table\":" << body.str();
    }
    cfg << "}";
    CString report, err;
    fb_status rc = fb_run_suite(cfg.str().c_str(), &report.ptr, &err.ptr);
    if (rc != FB_OK && rc != FB_CHECKS_FAILED) {
        std::cerr << "fbasis: " << (err.ptr ? err.ptr : "error") << "\n";
        return rc == FB_ERR_CONFIG || rc == FB_ERR_MALFORMED_DOCUMENT ||
                       rc == FB_ERR_MISSING_ENTRY || rc == FB_ERR_RANK_MISMATCH
                   ? 2
                   : 3;
    }
    if (int wrc = write_output(report.ptr ? report.ptr : "", opt.out_path))
        return wrc;
    if (!opt.out_path.empty())
        std::cerr << "fbasis: " << suite << (rc == FB_OK ? " passed" : " FAILED") << ", report at "
                  << opt.out_path << "\n";
    return rc == FB_OK ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification suites and domain wall partition functions for U(1)^(N-1) "
                 "vertex models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fb_version()));

    SuiteOptions suite_opt;
    std::string chosen_suite;
    for (const char* name : {"weights-check", "factorization", "twist-compare", "dwpf-agree", "all"}) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run the ") + name + " suite");
        add_suite_options(cmd, suite_opt);
        cmd->callback([&chosen_suite, name] { chosen_suite = name; });
    }

    // dwpf: evaluate one instance by all applicable routes
    std::string kind = "C2", instance_path, dwpf_out;
    std::uint64_t dwpf_seed = 0;
    int dwpf_l = 3, dwpf_m = 0;
    std::vector<int> dwpf_q;
    CLI::App* dwpf = app.add_subcommand("dwpf", "evaluate a domain wall partition function");
    dwpf->add_option("--kind", kind, "C2 | B2 | C1 | B1 | mixedC | mixedB");
    dwpf->add_option("--L", dwpf_l, "chain length")->check(CLI::Range(1, 7));
    dwpf->add_option("--M", dwpf_m, "number of type-1 operators (mixed kinds)");
    dwpf->add_option("--q", dwpf_q, "charge positions q1 < q2 < ... (mixed kinds)");
    dwpf->add_option("--seed", dwpf_seed, "table seed");
    dwpf->add_option("--instance", instance_path, "instance document (overrides flags)");
    dwpf->add_option("--out", dwpf_out, "result file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    if (dwpf->parsed()) {
        std::string doc;
        if (!instance_path.empty()) {
            std::ifstream f(instance_path, std::ios::binary);
            if (!f) {
                std::cerr << "fbasis: cannot read instance '" << instance_path << "'\n";
                return 2;
            }
            std::ostringstream body;
            body << f.rdbuf();
            doc = body.str();
        } else {
            std::ostringstream body;
            body << "{\"kind\":\"" << json_escape(kind) << "\",\"L\":" << dwpf_l
                 << ",\"M\":" << dwpf_m << ",\"seed\":" << dwpf_seed << ",\"q\":[";
            for (std::size_t i = 0; i < dwpf_q.size(); ++i)
                body << (i ? "," : "") << dwpf_q[i];
            body << "]}";
            doc = body.str();
        }
        CString result, err;
        fb_status rc = fb_compute_dwpf(doc.c_str(), &result.ptr, &err.ptr);
        if (rc != FB_OK && rc != FB_CHECKS_FAILED) {
            std::cerr << "fbasis: " << (err.ptr ? err.ptr : "error") << "\n";
            return rc == FB_ERR_CONFIG || rc == FB_ERR_MALFORMED_DOCUMENT ? 2 : 3;
        }
        if (int wrc = write_output(result.ptr ? result.ptr : "", dwpf_out))
            return wrc;
        return rc == FB_OK ? 0 : 1;
    }

    return run_suite_command(chosen_suite, suite_opt);
}
