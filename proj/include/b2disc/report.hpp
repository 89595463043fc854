#pragma once

#include <string>

#include "json.hpp"

#include "b2disc/bloch.hpp"
#include "b2disc/extension.hpp"
#include "b2disc/operators.hpp"
#include "b2disc/weights.hpp"

namespace b2disc::report {

using json = nlohmann::ordered_json;

json to_json(const weights::B2Report& r);
json to_json(const weights::GammaReport& r);
json to_json(const weights::JNProfile& r);
json to_json(const weights::SarasonResult& r);
json to_json(const weights::B1StarResult& r);
json to_json(const std::vector<weights::VanishingProfilePoint>& profile);
json to_json(const extension::HyperbolicNet& n);
json to_json(const extension::Decomposition& d);
json to_json(const extension::SandwichResult& s);
json to_json(const extension::SNormResult& s);
json to_json(const bloch::AnnulusFloor& f);
json to_json(const bloch::OffAnnuliSup& s);
json to_json(const operators::SpectrumReport& r);
json to_json(const operators::TruncationTrace& t);

// envelope: kind + resolved config + result + timestamp
json envelope(const std::string& kind, json config, json result, bool with_timestamp = true);

// write CSV: one header row, float64 columns
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace b2disc::report
