#include "fbasis/fbasis.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "rng.hpp"
#include "suite.hpp"
#include "weights.hpp"

using nlohmann::json;

struct fb_table {
    fbasis::WeightTable table;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** errmsg, const std::string& msg) {
    if (errmsg)
        *errmsg = dup_string(msg);
}

fb_status status_of(const fbasis::Error& e) { return static_cast<fb_status>(e.code()); }

template <class Fn>
fb_status guarded(char** errmsg, Fn&& fn) {
    try {
        return fn();
    } catch (const fbasis::Error& e) {
        set_error(errmsg, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(errmsg, std::string("malformed JSON: ") + e.what());
        return FB_ERR_MALFORMED_DOCUMENT;
    } catch (const std::bad_alloc&) {
        set_error(errmsg, "out of memory");
        return FB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(errmsg, e.what());
        return FB_ERR_INTERNAL;
    }
}

fbasis::WeightTable generate_from_spec(const json& spec) {
    using namespace fbasis;
    if (!spec.is_object() || !spec.contains("model"))
        raise(errc::config, "generator spec needs a 'model'");
    std::string model = spec["model"].get<std::string>();
    std::uint64_t seed = spec.value("seed", 0ULL);
    int n_inh = spec.value("inhomogeneities", 4);
    int n_aux = spec.value("auxiliaries", 0);
    if (n_inh < 1 || n_inh > 9 || n_aux < 0 || n_aux > 9)
        raise(errc::config, "rapidity counts out of range");
    RapiditySet raps;
    for (int i = 1; i <= n_inh; ++i)
        raps.inhomogeneities.push_back("xi" + std::to_string(i));
    for (int i = 1; i <= n_aux; ++i)
        raps.auxiliaries.push_back("au" + std::to_string(i));
    SplitMix64 rng(seed);
    if (model == "del_pezzo" || model == "del-pezzo")
        return build_del_pezzo(sample_del_pezzo_params(seed, raps.all()), raps);
    if (model == "perk_schultz" || model == "perk-schultz") {
        cplx q = rng.annulus();
        for (const auto& lab : raps.all())
            raps.values[lab] = rng.annulus();
        return build_perk_schultz(q, raps);
    }
    if (model == "six_vertex" || model == "six-vertex") {
        cplx eta = rng.annulus();
        for (const auto& lab : raps.all())
            raps.values[lab] = rng.annulus();
        return build_six_vertex(eta, raps);
    }
    raise(errc::config, "unknown generator model '" + model + "'");
}

} // namespace

extern "C" {

const char* fb_version(void) { return "1.0.0"; }

fb_status fb_table_generate(const char* spec_json, fb_table** out, char** errmsg) {
    if (!spec_json || !out)
        return FB_ERR_CONFIG;
    *out = nullptr;
    return guarded(errmsg, [&] {
        json spec = json::parse(spec_json);
        *out = new fb_table{generate_from_spec(spec)};
        return FB_OK;
    });
}

fb_status fb_table_import(const char* doc_json, fb_table** out, char** errmsg) {
    if (!doc_json || !out)
        return FB_ERR_CONFIG;
    *out = nullptr;
    return guarded(errmsg, [&] {
        json doc = json::parse(doc_json);
        *out = new fb_table{fbasis::import_custom(doc)};
        return FB_OK;
    });
}

fb_status fb_table_export(const fb_table* table, char** out, char** errmsg) {
    if (!table || !out)
        return FB_ERR_CONFIG;
    *out = nullptr;
    return guarded(errmsg, [&] {
        *out = dup_string(fbasis::export_table(table->table).dump());
        return *out ? FB_OK : FB_ERR_INTERNAL;
    });
}

fb_status fb_table_weight(const fb_table* table, const char* x, const char* y, const char* kind,
                          double out[2], char** errmsg) {
    if (!table || !x || !y || !kind || !out)
        return FB_ERR_CONFIG;
    return guarded(errmsg, [&] {
        fbasis::cplx v = table->table.weight(x, y, fbasis::WeightKind::parse(kind));
        out[0] = v.real();
        out[1] = v.imag();
        return FB_OK;
    });
}

int fb_table_rank(const fb_table* table) { return table ? table->table.rank() : 0; }

void fb_table_free(fb_table* table) { delete table; }

fb_status fb_run_suite(const char* config_json, char** report_out, char** errmsg) {
    if (!config_json || !report_out)
        return FB_ERR_CONFIG;
    *report_out = nullptr;
    return guarded(errmsg, [&] {
        fbasis::SuiteConfig cfg = fbasis::SuiteConfig::from_json(json::parse(config_json));
        fbasis::SuiteResult res = fbasis::run_suite(cfg);
        std::string text = cfg.format == "csv" ? fbasis::report_to_csv(res.report)
                                               : res.report.dump(2) + "\n";
        *report_out = dup_string(text);
        if (!*report_out)
            return FB_ERR_INTERNAL;
        return res.exit_code == 0 ? FB_OK : FB_CHECKS_FAILED;
    });
}

fb_status fb_compute_dwpf(const char* instance_json, char** result_out, char** errmsg) {
    if (!instance_json || !result_out)
        return FB_ERR_CONFIG;
    *result_out = nullptr;
    return guarded(errmsg, [&] {
        json result = fbasis::compute_dwpf(json::parse(instance_json));
        *result_out = dup_string(result.dump(2) + "\n");
        if (!*result_out)
            return FB_ERR_INTERNAL;
        return result["pass"].get<bool>() ? FB_OK : FB_CHECKS_FAILED;
    });
}

void fb_string_free(char* s) { std::free(s); }

} // extern "C"
