#pragma once

#include <string>
#include <vector>

#include "bcgwr/bgwr.hpp"
#include "bcgwr/clustering.hpp"
#include "bcgwr/rjmcmc.hpp"

namespace bcgwr {

// Draw log: one row per (draw, region) in a fixed column order —
//   draw, region, sigma2, sigma2_beta, bandwidth, beta_0..beta_{p-1}
// plus gamma_0..gamma_{p-1} when the draws carry selection indicators.
// Globals repeat on every region row so each row is self-contained. Numbers
// print as %.17g, so a reread round-trips exactly.
void write_draws_csv(const PosteriorDraws& draws, const std::string& path);
PosteriorDraws read_draws_csv(const std::string& path);

void write_summary_csv(const PosteriorDraws& draws, const std::vector<std::string>& region_ids,
                       const std::vector<std::string>& coef_names, const std::string& path);

void write_acceptance_csv(const AcceptanceReport& report, const std::string& path);

void write_inclusion_csv(const InclusionSummary& summary, int num_regions,
                         const std::vector<std::string>& region_ids,
                         const std::vector<std::string>& coef_names, const std::string& path);

void write_configuration_csv(const ClusterConfiguration& configuration,
                             const std::vector<std::string>& region_ids,
                             const std::string& path);

// Manifest with enough metadata to reproduce the file set: command name,
// seed, the effective config as JSON, and an FNV-1a hash of that JSON.
void write_manifest_json(const std::string& command, std::uint64_t seed,
                         const std::string& config_json, const std::string& path);

std::string fnv1a_hex(const std::string& text);

// %.17g formatting shared by all emitters (byte-identical reruns).
std::string format_double(double v);

}  // namespace bcgwr
