#include "drsom/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace {

using drsom::json;
using drsom::Vector;

TEST(InstanceIo, LpRoundTripIsExact) {
  const auto inst = drsom::lp_generate(30, 12, 0.2, 0.5, 0.1, 77);
  const json j = drsom::to_json(inst);
  const auto back = drsom::lp_from_json(json::parse(j.dump()));
  EXPECT_EQ((inst.A - back.A).norm(), 0.0);
  EXPECT_EQ((inst.b - back.b).norm(), 0.0);
  EXPECT_EQ(inst.lambda_reg, back.lambda_reg);
  EXPECT_EQ(inst.seed, back.seed);
  EXPECT_EQ(drsom::instance_digest(j),
            drsom::instance_digest(drsom::to_json(back)));
}

TEST(InstanceIo, SnlRoundTripIsExact) {
  const auto inst = drsom::snl_generate(25, 3, 0.5, 0.05, 8);
  const json j = drsom::to_json(inst);
  const auto back = drsom::snl_from_json(json::parse(j.dump()));
  EXPECT_EQ((inst.anchors - back.anchors).norm(), 0.0);
  EXPECT_EQ((inst.truth - back.truth).norm(), 0.0);
  ASSERT_EQ(inst.sensor_edges.size(), back.sensor_edges.size());
  for (std::size_t i = 0; i < inst.sensor_edges.size(); ++i) {
    EXPECT_EQ(inst.sensor_edges[i].dist, back.sensor_edges[i].dist);
  }
  EXPECT_EQ(drsom::instance_digest(j),
            drsom::instance_digest(drsom::to_json(back)));
}

TEST(InstanceIo, UnsupportedVersionRejected) {
  auto inst = drsom::lp_generate(10, 5, 0.5, 0.5, 0.1, 1);
  json j = drsom::to_json(inst);
  j["version"] = 999;
  EXPECT_THROW(drsom::lp_from_json(j), std::runtime_error);
  j = drsom::to_json(inst);
  j["format"] = "something-else";
  EXPECT_THROW(drsom::lp_from_json(j), std::runtime_error);
}

TEST(InstanceIo, KindMismatchRejected) {
  const auto inst = drsom::lp_generate(10, 5, 0.5, 0.5, 0.1, 1);
  EXPECT_THROW(drsom::snl_from_json(drsom::to_json(inst)),
               std::runtime_error);
}

TEST(TraceCsv, SchemaAndFormatting) {
  std::vector<drsom::TraceRecord> trace(2);
  trace[0].k = 0;
  trace[0].f = 1.5;
  trace[0].gnorm = 2.0;
  trace[0].lambda_or_mu = 0.25;
  trace[0].delta = 1.0;
  trace[0].rho = 0.9;
  trace[0].step_norm = 0.1;
  trace[0].accepted = true;
  trace[1].k = 1;
  trace[1].accepted = false;
  const std::string csv = drsom::trace_to_csv(trace);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,f,gnorm,lambda_or_mu,delta,rho,step_norm,accepted");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1.5,2,0.25,1,0.9,0.1,1");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "1,");
  EXPECT_EQ(line.back(), '0');
}

TEST(SummaryJson, CarriesAllReportedFields) {
  drsom::RunReport report;
  report.status = drsom::Status::kConverged;
  report.iterations = 12;
  report.f_final = 1e-9;
  report.gnorm_final = 1e-6;
  report.evals.n_f = 20;
  report.evals.n_g = 15;
  report.evals.n_hvp = 24;
  report.solver = "drsom";
  report.wall_seconds = 0.01;
  const json j = drsom::summary_to_json(report, "cfg123", "inst456");
  for (const char* key :
       {"status", "iterations", "f_final", "gnorm_final", "n_f", "n_g",
        "n_hvp", "wall_seconds", "solver", "config_digest",
        "instance_digest"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["status"], "converged");
  EXPECT_EQ(j["n_hvp"], 24);
}

TEST(Digest, StableAndSensitive) {
  EXPECT_EQ(drsom::digest("abc"), drsom::digest("abc"));
  EXPECT_NE(drsom::digest("abc"), drsom::digest("abd"));
  EXPECT_EQ(drsom::digest("abc").size(), 16u);
}

}  // namespace
