#pragma once

#include <string>

#include "json.hpp"

#include "grslab/matalg.hpp"
#include "grslab/report.hpp"
#include "grslab/seqspace.hpp"
#include "grslab/tfa.hpp"
#include "grslab/weight.hpp"
#include "grslab/weightlab.hpp"

namespace grslab::io {

using Json = nlohmann::ordered_json;

Json to_json(const ConditionReport& rep);
Json to_json(const matalg::ExpFit& fit);
Json to_json(const matalg::DecayProfile& prof);
Json to_json(const matalg::InverseClosednessReport& rep);
Json to_json(const seqspace::IdentityReport& rep);
Json to_json(const tfa::ModspaceReport& rep);
Json to_json(const tfa::GsProbeResult& rep);

/// Tabulated weight from CSV with header x_1[,x_2],value: one row per grid
/// point of a centered uniform lattice, positive values.
Weight load_weight_csv(const std::string& path);

/// Resolves a weight literal, routing tabulated:<path> through the CSV
/// loader and everything else through Weight::parse.
Weight load_weight(const std::string& literal);

/// Lattice sequence from CSV with header k_1[,k_2],value covering the whole
/// centered cube.
seqspace::LatticeSeq load_seq_csv(const std::string& path);

/// Matrix from CSV rows j,k,value with indices in -N..N (header optional,
/// missing entries zero).
matalg::LatticeMatrix load_matrix_csv(const std::string& path);

/// Signal from CSV with header x,re,im on a centered uniform grid.
tfa::SampledSignal load_signal_csv(const std::string& path);

/// CSV x,xi,re,im plus a JSON sidecar carrying spacings, extents and the
/// window id.
void write_stft_csv(const tfa::STFTGrid& grid, const std::string& csv_path,
                    const std::string& sidecar_path);

}  // namespace grslab::io
