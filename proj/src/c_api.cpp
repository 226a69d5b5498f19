/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "ffuniv/ffuniv.h"

#include <cstring>
#include <string>

#include "ffuniv/characters.hpp"
#include "ffuniv/config.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/lfunctions.hpp"
#include "ffuniv/runner.hpp"
#include "ffuniv/universality.hpp"

struct ffu_group {
    ffuniv::GroupPtr G;
};

struct ffu_config {
    ffuniv::ExperimentConfig cfg;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_message;

ffu_status fail(ffu_status s, std::string msg)
{
    last_error = std::move(msg);
    return s;
}

ffu_status status_of(ffuniv::ErrorKind k)
{
    using ffuniv::ErrorKind;
    switch (k) {
    case ErrorKind::Precondition: return FFU_E_PRECONDITION;
    case ErrorKind::Domain: return FFU_E_DOMAIN;
    case ErrorKind::Capacity: return FFU_E_CAPACITY;
    case ErrorKind::Numeric: return FFU_E_NUMERIC;
    case ErrorKind::Unsupported: return FFU_E_UNSUPPORTED;
    case ErrorKind::Parse: return FFU_E_PARSE;
    case ErrorKind::Construction: return FFU_E_CONSTRUCTION;
    }
    return FFU_E_INTERNAL;
}

template <class Fn>
ffu_status guarded(Fn&& fn)
{
    try {
        last_error.clear();
        return fn();
    } catch (const ffuniv::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(FFU_E_CAPACITY, "out of memory");
    } catch (const std::exception& e) {
        return fail(FFU_E_INTERNAL, e.what());
    } catch (...) {
        return fail(FFU_E_INTERNAL, "unknown exception");
    }
}

ffu_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed)
{
    if (needed)
        *needed = s.size() + 1;
    if (!buf || cap < s.size() + 1)
        return fail(FFU_E_BUFFER, "buffer of " + std::to_string(cap) + " bytes, need " + std::to_string(s.size() + 1));
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return FFU_OK;
}

ffuniv::Character character(const ffu_group* g, uint64_t index)
{
    if (index >= g->G->phi())
        throw ffuniv::DomainError("character index " + std::to_string(index) + " >= phi = " +
                                  std::to_string(g->G->phi()));
    return ffuniv::character_at(g->G, index);
}

}  // namespace

extern "C" {

const char* ffu_version(void)
{
    return "0.1.0";
}

const char* ffu_status_name(ffu_status s)
{
    switch (s) {
    case FFU_OK: return "ok";
    case FFU_E_ARGUMENT: return "argument";
    case FFU_E_PRECONDITION: return "precondition";
    case FFU_E_DOMAIN: return "domain";
    case FFU_E_CAPACITY: return "capacity";
    case FFU_E_NUMERIC: return "numeric";
    case FFU_E_UNSUPPORTED: return "unsupported";
    case FFU_E_PARSE: return "parse";
    case FFU_E_CONSTRUCTION: return "construction";
    case FFU_E_BUFFER: return "buffer";
    case FFU_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ffu_last_error(void)
{
    return last_error.c_str();
}

const char* ffu_last_message(void)
{
    return last_message.c_str();
}

ffu_status ffu_group_create(uint32_t p, uint32_t k, const char* Q, ffu_group** out)
{
    if (!Q || !out)
        return fail(FFU_E_ARGUMENT, "ffu_group_create: null argument");
    *out = nullptr;
    return guarded([&] {
        const ffuniv::PolyRing R(ffuniv::make_field(p, k));
        const auto q = R.parse(Q);
        if (!q.is_monic() || q.deg() < 1)
            throw ffuniv::PreconditionError("modulus must be monic of degree >= 1");
        *out = new ffu_group{ffuniv::UnitGroup::build(R, q)};
        return FFU_OK;
    });
}

void ffu_group_free(ffu_group* g)
{
    delete g;
}

ffu_status ffu_group_phi(const ffu_group* g, uint64_t* phi)
{
    if (!g || !phi)
        return fail(FFU_E_ARGUMENT, "ffu_group_phi: null argument");
    *phi = g->G->phi();
    return FFU_OK;
}

ffu_status ffu_group_degree(const ffu_group* g, int* degQ)
{
    if (!g || !degQ)
        return fail(FFU_E_ARGUMENT, "ffu_group_degree: null argument");
    *degQ = g->G->degQ();
    return FFU_OK;
}

ffu_status ffu_group_orders(const ffu_group* g, uint32_t* orders, size_t cap, size_t* n)
{
    if (!g || !n)
        return fail(FFU_E_ARGUMENT, "ffu_group_orders: null argument");
    const auto& o = g->G->orders();
    *n = o.size();
    if (!orders || cap < o.size())
        return fail(FFU_E_BUFFER, "ffu_group_orders: need " + std::to_string(o.size()) + " entries");
    std::copy(o.begin(), o.end(), orders);
    return FFU_OK;
}

ffu_status ffu_lpoly(const ffu_group* g, uint64_t index, double* coeffs, size_t cap, size_t* n)
{
    if (!g || !n)
        return fail(FFU_E_ARGUMENT, "ffu_lpoly: null argument");
    return guarded([&] {
        const auto L = ffuniv::l_coeffs(character(g, index));
        *n = 2 * L.coeffs.size();
        if (!coeffs || cap < *n)
            return fail(FFU_E_BUFFER, "ffu_lpoly: need " + std::to_string(*n) + " doubles");
        for (size_t i = 0; i < L.coeffs.size(); ++i) {
            coeffs[2 * i] = L.coeffs[i].real();
            coeffs[2 * i + 1] = L.coeffs[i].imag();
        }
        return FFU_OK;
    });
}

ffu_status ffu_character_is_even(const ffu_group* g, uint64_t index, int* even)
{
    if (!g || !even)
        return fail(FFU_E_ARGUMENT, "ffu_character_is_even: null argument");
    return guarded([&] {
        *even = ffuniv::is_even(character(g, index)) ? 1 : 0;
        return FFU_OK;
    });
}

ffu_status ffu_search(const ffu_group* g, const char* target, double epsilon, unsigned workers,
                      ffu_search_result* out)
{
    if (!g || !target || !out)
        return fail(FFU_E_ARGUMENT, "ffu_search: null argument");
    return guarded([&] {
        const auto t = ffuniv::TargetFunction::parse(target);
        const auto grid = ffuniv::RegionGrid::default_u(g->G->q());
        const auto r = ffuniv::universality_search(g->G, t, grid, epsilon, workers);
        *out = ffu_search_result{r.phi, r.best_index, r.best_distance, r.within, r.proportion, r.mean_distance};
        return FFU_OK;
    });
}

ffu_status ffu_config_load(const char* path, int strict, ffu_config** out)
{
    if (!path || !out)
        return fail(FFU_E_ARGUMENT, "ffu_config_load: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new ffu_config{ffuniv::ExperimentConfig::load(path, strict != 0)};
        return FFU_OK;
    });
}

ffu_status ffu_config_parse(const char* text, int strict, ffu_config** out)
{
    if (!text || !out)
        return fail(FFU_E_ARGUMENT, "ffu_config_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new ffu_config{ffuniv::ExperimentConfig::parse(text, strict != 0)};
        return FFU_OK;
    });
}

void ffu_config_free(ffu_config* c)
{
    delete c;
}

ffu_status ffu_config_set(ffu_config* c, const char* key, const char* value)
{
    if (!c || !key || !value)
        return fail(FFU_E_ARGUMENT, "ffu_config_set: null argument");
    return guarded([&] {
        c->cfg.set(key, value);
        return FFU_OK;
    });
}

ffu_status ffu_config_get(const ffu_config* c, const char* key, char* buf, size_t cap, size_t* needed)
{
    if (!c || !key)
        return fail(FFU_E_ARGUMENT, "ffu_config_get: null argument");
    return guarded([&] { return copy_out(c->cfg.get(key), buf, cap, needed); });
}

ffu_status ffu_config_serialize(const ffu_config* c, char* buf, size_t cap, size_t* needed)
{
    if (!c)
        return fail(FFU_E_ARGUMENT, "ffu_config_serialize: null argument");
    return guarded([&] { return copy_out(c->cfg.serialize(), buf, cap, needed); });
}

const char* ffu_command_name(size_t i)
{
    const auto& c = ffuniv::commands();
    return i < c.size() ? c[i].c_str() : nullptr;
}

const char* ffu_command_summary(size_t i)
{
    const auto& c = ffuniv::commands();
    return i < c.size() ? ffuniv::command_summary(c[i]).c_str() : nullptr;
}

ffu_status ffu_run(const ffu_config* c, const char* command, const char* out_dir, int* exit_code)
{
    if (!c || !command || !out_dir || !exit_code)
        return fail(FFU_E_ARGUMENT, "ffu_run: null argument");
    return guarded([&] {
        const auto r = ffuniv::run(command, c->cfg, out_dir);
        *exit_code = r.exit_code;
        last_message = r.message;
        return FFU_OK;
    });
}

}  // extern "C"
