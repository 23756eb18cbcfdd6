#include "tokbias/report.hpp"

#include <cctype>
#include <set>

#include <json.hpp>

#include "tokbias/error.hpp"

namespace tokbias {

using ojson = nlohmann::ordered_json;

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

std::string report_to_json(const MetricsReport& report) {
  // ordered_json keeps keys in a vector; build members before inserting.
  ojson j;
  j["schema"] = kMetricsSchema;
  if (report.sample_plan) {
    ojson per = ojson::object();
    for (const auto& [len, take] : report.sample_plan->per_length) per[std::to_string(len)] = take;
    j["sample_plan"] = {{"cap", report.sample_plan->cap}, {"total", report.sample_plan->total}, {"per_length", per}};
  } else {
    j["sample_plan"] = nullptr;
  }
  ojson tra = ojson::array();
  for (const auto& [key, cell] : report.tra) {
    tra.push_back({{"model", key.first},
                   {"variant", to_string(key.second)},
                   {"present", cell.present},
                   {"total", cell.total},
                   {"value", cell.value}});
  }
  j["tra"] = std::move(tra);
  ojson ranking = ojson::object();
  for (const auto& [id, row] : report.ranking_matrix) ranking[id] = row;
  j["ranking_matrix"] = std::move(ranking);
  ojson scores = ojson::array();
  for (const auto& [key, dist] : report.score_dist) {
    scores.push_back({{"model", key.first}, {"variant", to_string(key.second)}, {"fractions", dist}});
  }
  j["score_dist"] = std::move(scores);
  ojson cons = ojson::object();
  for (const auto& [type, cell] : report.consistency) {
    cons[type] = {{"accuracy", cell.accuracy}, {"consistency", cell.consistency}, {"judged", cell.judged}};
  }
  j["consistency"] = std::move(cons);
  ojson s5 = ojson::object();
  for (const auto& [len, row] : report.score5_by_size) {
    ojson r = ojson::object();
    for (const auto& [id, n] : row) r[id] = n;
    s5[std::to_string(len)] = std::move(r);
  }
  j["score5_by_size"] = std::move(s5);
  return j.dump(2);
}

MetricsReport report_from_json(std::string_view json) {
  MetricsReport report;
  try {
    const auto j = nlohmann::json::parse(json);
    if (j.value("schema", std::string(kMetricsSchema)) != kMetricsSchema) {
      throw Error(Errc::MalformedRecord, "metrics schema " + j.at("schema").get<std::string>());
    }
    if (j.contains("sample_plan") && !j.at("sample_plan").is_null()) {
      const auto& p = j.at("sample_plan");
      SamplePlan plan;
      plan.cap = p.at("cap").get<std::size_t>();
      plan.total = p.at("total").get<std::size_t>();
      for (const auto& [len, take] : p.at("per_length").items()) {
        plan.per_length[std::stoul(len)] = take.get<std::size_t>();
      }
      report.sample_plan = plan;
    }
    const auto variant_of = [](const nlohmann::json& v) {
      const auto parsed = parse_variant(v.get<std::string>());
      if (!parsed) throw Error(Errc::MalformedRecord, "variant " + v.dump());
      return *parsed;
    };
    const auto empty_obj = nlohmann::json::object();
    const auto member = [&](const char* key) -> const nlohmann::json& {
      return j.contains(key) ? j.at(key) : empty_obj;
    };
    for (const auto& t : member("tra")) {
      report.tra[{t.at("model").get<std::string>(), variant_of(t.at("variant"))}] = {
          t.at("present").get<std::size_t>(), t.at("total").get<std::size_t>(),
          t.at("value").get<double>()};
    }
    for (const auto& [id, row] : member("ranking_matrix").items()) {
      report.ranking_matrix[id] = row.get<std::vector<double>>();
    }
    for (const auto& s : member("score_dist")) {
      report.score_dist[{s.at("model").get<std::string>(), variant_of(s.at("variant"))}] =
          s.at("fractions").get<std::array<double, 6>>();
    }
    for (const auto& [type, c] : member("consistency").items()) {
      report.consistency[type] = {c.at("accuracy").get<double>(), c.at("consistency").get<double>(),
                                  c.value("judged", std::size_t{0})};
    }
    for (const auto& [len, row] : member("score5_by_size").items()) {
      auto& r = report.score5_by_size[std::stoul(len)];
      for (const auto& [id, n] : row.items()) r[id] = n.get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("metrics report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::MalformedRecord, std::string("metrics report: bad length key"));
  }
  return report;
}

namespace {

std::string ordinal(std::size_t pos) {
  switch (pos) {
    case 1: return "1st";
    case 2: return "2nd";
    case 3: return "3rd";
    default: return std::to_string(pos) + "th";
  }
}

std::string variant_heading(Variant v) { return v == Variant::Long ? "Long" : "Short"; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string markdown() const {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
    out += "\n";
    for (const auto& row : rows) {
      out += "|";
      for (const auto& cell : row) out += " " + cell + " |";
      out += "\n";
    }
    return out;
  }

  std::string csv() const {
    const auto line = [](const std::vector<std::string>& cells) {
      std::string out;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      return out + "\n";
    };
    std::string out = line(header);
    for (const auto& row : rows) out += line(row);
    return out;
  }
};

std::set<std::string> models_of(const MetricsReport& r) {
  std::set<std::string> models;
  for (const auto& [key, cell] : r.tra) models.insert(key.first);
  for (const auto& [key, dist] : r.score_dist) models.insert(key.first);
  return models;
}

struct NamedTable {
  std::string file;
  std::string title;
  Table table;
  Table csv_table;
};

std::vector<NamedTable> build_tables(const MetricsReport& r) {
  std::vector<NamedTable> tables;

  if (r.sample_plan) {
    Table md{{"Token Size"}, {{"Token Count"}}};
    Table csv{{"length", "count"}, {}};
    for (const auto& [len, take] : r.sample_plan->per_length) {
      md.header.push_back(std::to_string(len));
      md.rows[0].push_back(std::to_string(take));
      csv.rows.push_back({std::to_string(len), std::to_string(take)});
    }
    md.header.push_back("Total");
    md.rows[0].push_back(std::to_string(r.sample_plan->total));
    tables.push_back({"token_counts.csv", "Token counts by size", md, csv});
  }

  if (!r.tra.empty()) {
    Table md{{"Model", "Long token", "Shorter tokens"}, {}};
    Table csv{{"model", "variant", "present", "total", "tra"}, {}};
    for (const auto& model : models_of(r)) {
      std::vector<std::string> row{model};
      for (const auto v : {Variant::Long, Variant::Split}) {
        const auto it = r.tra.find({model, v});
        if (it == r.tra.end()) {
          row.push_back("-");
          continue;
        }
        const auto& c = it->second;
        row.push_back(std::to_string(c.present) + " (" + format4(c.value) + ")");
        csv.rows.push_back({model, std::string(to_string(v)), std::to_string(c.present),
                            std::to_string(c.total), format4(c.value)});
      }
      md.rows.push_back(row);
    }
    tables.push_back({"tra.csv", "Tokens appeared in the created sentences", md, csv});
  }

  if (!r.ranking_matrix.empty()) {
    const auto k = r.ranking_matrix.begin()->second.size();
    Table md{{"ID"}, {}};
    Table csv{{"id"}, {}};
    for (std::size_t p = 1; p <= k; ++p) {
      md.header.push_back(ordinal(p));
      csv.header.push_back("pos" + std::to_string(p));
    }
    for (const auto& [id, row] : r.ranking_matrix) {
      std::vector<std::string> cells{id};
      for (const auto x : row) cells.push_back(format4(x));
      md.rows.push_back(cells);
      csv.rows.push_back(cells);
    }
    tables.push_back({"ranking.csv", "Created sentences ranked by the judge", md, csv});
  }

  if (!r.score_dist.empty()) {
    Table md{{"Score"}, {}};
    Table csv{{"score"}, {}};
    for (const auto& [key, dist] : r.score_dist) {
      md.header.push_back(key.first + " " + variant_heading(key.second));
      csv.header.push_back(key.first + ":" + std::string(to_string(key.second)));
    }
    for (std::size_t s = 0; s < 6; ++s) {
      std::vector<std::string> cells{std::to_string(s)};
      for (const auto& [key, dist] : r.score_dist) cells.push_back(format4(dist[s]));
      md.rows.push_back(cells);
      csv.rows.push_back(cells);
    }
    tables.push_back({"scores.csv", "Token relevance and sentence accuracy scores", md, csv});
  }

  if (!r.consistency.empty()) {
    Table md{{"Type", "Accuracy", "Consistency"}, {}};
    Table csv{{"type", "accuracy", "consistency", "judged"}, {}};
    for (const auto& [type, c] : r.consistency) {
      auto name = type;
      if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
      md.rows.push_back({name, format4(c.accuracy), format4(c.consistency)});
      csv.rows.push_back({type, format4(c.accuracy), format4(c.consistency), std::to_string(c.judged)});
    }
    tables.push_back({"consistency.csv", "Token explanation and translations evaluated by the judge", md, csv});
  }

  if (!r.score5_by_size.empty()) {
    std::vector<std::string> series;
    for (const auto& [id, n] : r.score5_by_size.begin()->second) {
      if (id != kTotalSeries) series.push_back(id);
    }
    series.emplace_back(kTotalSeries);
    Table md{{"Size"}, {}};
    Table csv{{"length"}, {}};
    for (const auto& s : series) {
      md.header.push_back(s);
      csv.header.push_back(s);
    }
    for (const auto& [len, row] : r.score5_by_size) {
      std::vector<std::string> cells{std::to_string(len)};
      for (const auto& s : series) {
        const auto it = row.find(s);
        cells.push_back(std::to_string(it == row.end() ? 0 : it->second));
      }
      md.rows.push_back(cells);
      csv.rows.push_back(cells);
    }
    tables.push_back({"score5_by_size.csv", "Score-5 sentences by token size", md, csv});
  }
  return tables;
}

}  // namespace

std::map<std::string, std::string> render_report(const MetricsReport& report, ReportFormat format) {
  std::map<std::string, std::string> docs;
  switch (format) {
    case ReportFormat::Json:
      docs["report.json"] = report_to_json(report);
      break;
    case ReportFormat::Markdown: {
      std::string md = "# Tokenizer bias audit report\n";
      for (const auto& t : build_tables(report)) md += "\n## " + t.title + "\n\n" + t.table.markdown();
      docs["report.md"] = md;
      break;
    }
    case ReportFormat::Csv:
      for (const auto& t : build_tables(report)) docs[t.file] = t.csv_table.csv();
      break;
  }
  return docs;
}

}  // namespace tokbias
