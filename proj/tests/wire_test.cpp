// Copyright 2026 The s2c-iae Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "support.hpp"

namespace s2c {
namespace {

namespace fs = std::filesystem;
using testing::logits;

const fs::path kGolden = fs::path(S2C_FIXTURES) / "golden";

TEST(Golden, FixturesAreByteExact) {
  auto frames = golden::frames();
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(kGolden)) {
    ++files;
    ASSERT_TRUE(frames.count(e.path().filename().string())) << "stray fixture " << e.path();
  }
  EXPECT_EQ(files, frames.size());
  for (const auto& [name, frame] : frames) {
    EXPECT_EQ(read_file(kGolden / name), frame) << name;
    EXPECT_EQ(frame.back(), '\n');
    EXPECT_EQ(std::count(frame.begin(), frame.end(), '\n'), 1) << name;
  }
}

TEST(Golden, KeysAreSorted) {
  for (const auto& [name, frame] : golden::frames()) {
    auto j = nlohmann::json::parse(frame);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end())) << name;
    EXPECT_EQ(j.at("protocol"), "s2c-gen/1");
  }
}

TEST(Golden, BannedResponseHonoursBansAndValidates) {
  auto onto = synthetic::ontology();
  auto req = wire::decode_request(read_file(kGolden / "request_banned.jsonl"));
  auto resp = wire::decode_response(read_file(kGolden / "response_banned.jsonl"));
  const Template& t = onto.at(req.input.event_type);
  EXPECT_TRUE(validate_response(resp, req, t).empty());
  EXPECT_FALSE(req.banned.empty());
  EXPECT_FALSE(req.input.retrieved.empty());
  for (const auto& a : resp.arguments) EXPECT_FALSE(req.banned.contains(*t.role_of(a.slot_id), a.text)) << a.text;
  // The first gold argument of the event was banned and is left unfilled.
  EXPECT_EQ(resp.filled_text.rfind("<arg> ", 0), 0u) << resp.filled_text;
}

TEST(Golden, ReplayingDecodedRequestReproducesResponse) {
  OracleGenerator gen(golden::corpus(), synthetic::ontology(), {}, 0, 64);
  for (std::string which : {"first", "banned"}) {
    auto req = wire::decode_request(read_file(kGolden / ("request_" + which + ".jsonl")));
    EXPECT_EQ(wire::encode_request(req), read_file(kGolden / ("request_" + which + ".jsonl")));
    EXPECT_EQ(wire::encode_response(gen.generate(req)), read_file(kGolden / ("response_" + which + ".jsonl")));
  }
}

TEST(Golden, ResponsesCarryTopKLogits) {
  auto resp = wire::decode_response(read_file(kGolden / "response_first.jsonl"));
  ASSERT_FALSE(resp.arguments.empty());
  for (const auto& a : resp.arguments) {
    ASSERT_TRUE(a.first_token_logits);
    EXPECT_EQ(a.first_token_logits->values.size(), 50u);
    EXPECT_GT(a.first_token_logits->residual_mass, 0.0);
    EXPECT_NEAR(a.raw_prob, raw_probability(*a.first_token_logits), 1e-12);
  }
}

TEST(Golden, ErrorFrames) {
  EXPECT_THROW(wire::decode_response(read_file(kGolden / "error_retryable.jsonl")), TransportError);
  EXPECT_THROW(wire::decode_response(read_file(kGolden / "error_fatal.jsonl")), ProtocolError);
  EXPECT_THROW(wire::decode_embeddings(read_file(kGolden / "error_retryable.jsonl")), TransportError);
}

TEST(Golden, EmbedFrames) {
  auto texts = wire::decode_embed_request(read_file(kGolden / "embed_request.jsonl"));
  auto r = wire::decode_embeddings(read_file(kGolden / "embed_response.jsonl"));
  ASSERT_EQ(texts.size(), r.vectors.size());
  HashingEmbedder emb(8);
  for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(r.vectors[i], emb.embed(texts[i]));
}

GenerateRequest sample_request() {
  auto onto = testing::ontology();
  auto doc = testing::boston();
  EventPrediction retrieved;
  retrieved.filled_text = "Dzhokhar Tsarnaev attacked the marathon using <arg> at Boston place";
  GenerateRequest req{render_input(doc.event(2), doc, onto.at("Arrest"), &retrieved), {}, 7};
  req.banned.by_role["Detainee"] = {"Dzhokhar Tsarnaev", "Boston"};
  return req;
}

TEST(Wire, RequestRoundTrip) {
  auto req = sample_request();
  auto back = wire::decode_request(wire::encode_request(req));
  EXPECT_EQ(back.input.text(), req.input.text());
  EXPECT_EQ(back.input.event_ref, req.input.event_ref);
  EXPECT_EQ(back.input.event_type, "Arrest");
  EXPECT_EQ(back.input.retrieved, req.input.retrieved);
  EXPECT_EQ(back.input.template_text, req.input.template_text);
  EXPECT_EQ(back.banned, req.banned);
  EXPECT_EQ(back.top_k, 7);
}

TEST(Wire, ResponseRoundTrip) {
  GenerateResponse r;
  r.filled_text = "Police arrested Mike for <arg> at <arg> place";
  ArgumentPrediction a;
  a.text = "Police";
  a.slot_id = 1;
  a.first_token_logits = logits({2.5, -1.25, 0.1}, 3.0);
  a.first_token_logits->token_ids = {5, 9, 11};
  a.raw_prob = raw_probability(*a.first_token_logits);
  ArgumentPrediction b = a;
  b.text = "Mike";
  b.slot_id = 2;
  b.first_token_logits = logits({1.0});
  b.first_token_logits->token_ids = {0};
  b.raw_prob = 1.0;
  r.arguments = {a, b};
  auto back = wire::decode_response(wire::encode_response(r));
  ASSERT_EQ(back.arguments.size(), 2u);
  EXPECT_EQ(back.filled_text, r.filled_text);
  EXPECT_EQ(back.arguments[0].first_token_logits->values, a.first_token_logits->values);
  EXPECT_EQ(back.arguments[0].first_token_logits->token_ids, a.first_token_logits->token_ids);
  EXPECT_NEAR(back.arguments[0].first_token_logits->residual_mass, 3.0, 1e-12);
  EXPECT_EQ(back.arguments[1].first_token_logits->residual_mass, 0.0);
  EXPECT_EQ(back.arguments[0].raw_prob, a.raw_prob);
  EXPECT_NE(wire::encode_response(r).find("\"residual_log_mass\":null"), std::string::npos);
}

TEST(Wire, RejectsBadFrames) {
  EXPECT_THROW(wire::decode_response("not json"), ProtocolError);
  EXPECT_THROW(wire::decode_response("[1,2]"), ProtocolError);
  EXPECT_THROW(wire::decode_response(R"({"type":"result"})"), ProtocolError);
  EXPECT_THROW(wire::decode_response(R"({"protocol":"s2c-gen/2","type":"result","filled_text":"","arguments":[]})"),
               ProtocolError);
  EXPECT_THROW(wire::decode_response(R"({"protocol":"s2c-gen/1","type":"surprise"})"), ProtocolError);
  EXPECT_THROW(wire::decode_response(R"({"protocol":"s2c-gen/1","type":"result","filled_text":"x",
                                         "arguments":[{"text":"x","slot":1,"raw_prob":1,"logits":[[1]]}]})"),
               ProtocolError);
  auto req = nlohmann::json::parse(wire::encode_request(sample_request()));
  req["top_k"] = 0;
  EXPECT_THROW(wire::decode_request(req.dump()), ProtocolError);
  req["top_k"] = 5;
  req["input"] = "no markers here";
  EXPECT_THROW(wire::decode_request(req.dump()), ProtocolError);
  EXPECT_THROW(wire::decode_embeddings(R"({"protocol":"s2c-gen/1","type":"embeddings","vectors":[[1,0],[1]]})"),
               ProtocolError);
  EXPECT_THROW(wire::decode_embeddings(R"({"protocol":"s2c-gen/1","type":"embeddings","vectors":[[]]})"),
               ProtocolError);
}

class Scripted final : public Generator {
 public:
  explicit Scripted(std::function<GenerateResponse(const GenerateRequest&)> fn) : fn_(std::move(fn)) {}
  GenerateResponse generate(const GenerateRequest& r) const override { return fn_(r); }

 private:
  std::function<GenerateResponse(const GenerateRequest&)> fn_;
};

TEST(Remote, GeneratorRoundTrip) {
  std::vector<Document> docs{testing::boston()};
  auto onto = testing::ontology();
  OracleGenerator oracle(docs, onto, {}, 0, 80);
  GeneratorServer server(oracle);
  RemoteGenerator remote(server.address());
  for (int e : {1, 2}) {
    const Document& d = docs[0];
    GenerateRequest req{render_input(d.event(e), d, onto.at(d.event(e).event_type), nullptr), {}, kDefaultTopK};
    auto want = oracle.generate(req);
    auto got = remote.generate(req);
    EXPECT_EQ(got.filled_text, want.filled_text);
    ASSERT_EQ(got.arguments.size(), want.arguments.size());
    for (std::size_t i = 0; i < got.arguments.size(); ++i) {
      EXPECT_EQ(got.arguments[i].first_token_logits->values, want.arguments[i].first_token_logits->values);
      EXPECT_EQ(got.arguments[i].first_token_logits->values.size(), 50u);
      EXPECT_NEAR(got.arguments[i].first_token_logits->residual_mass, want.arguments[i].first_token_logits->residual_mass,
                  1e-12 * want.arguments[i].first_token_logits->residual_mass);
    }
    EXPECT_TRUE(validate_response(got, req, onto.at(d.event(e).event_type)).empty());
  }
}

TEST(Remote, ErrorsCrossTheWire) {
  Scripted busy([](const GenerateRequest&) -> GenerateResponse { throw TransportError("model busy"); });
  Scripted broken([](const GenerateRequest&) -> GenerateResponse { throw DataError("unknown event type"); });
  GeneratorServer s1(busy), s2(broken);
  auto req = sample_request();
  EXPECT_THROW(RemoteGenerator(s1.address()).generate(req), TransportError);
  EXPECT_THROW(RemoteGenerator(s2.address()).generate(req), ProtocolError);
  // The client reconnects after a failure.
  RemoteGenerator r(s1.address());
  EXPECT_THROW(r.generate(req), TransportError);
  EXPECT_THROW(r.generate(req), TransportError);
}

TEST(Remote, ConnectionFailures) {
  int port;
  {
    Scripted none([](const GenerateRequest&) { return GenerateResponse{}; });
    GeneratorServer s(none);
    port = s.port();
  }
  EXPECT_THROW(RemoteGenerator("127.0.0.1:" + std::to_string(port)).generate(sample_request()), TransportError);
  EXPECT_THROW(RemoteGenerator("no-port-here").generate(sample_request()), UsageError);
  EXPECT_THROW(RemoteGenerator("unix:/nonexistent/s2c.sock").generate(sample_request()), TransportError);
}

TEST(Remote, EmbedderRoundTrip) {
  Scripted none([](const GenerateRequest&) { return GenerateResponse{}; });
  HashingEmbedder local(16);
  GeneratorServer server(none, 0, &local);
  std::vector<std::string> warnings;
  RemoteEmbedder remote(server.address(), [&](std::string_view w) { warnings.emplace_back(w); });
  EXPECT_EQ(remote.dimension(), 16u);
  auto v = remote.embed("Police detained Mike");
  auto w = local.embed("Police detained Mike");
  ASSERT_EQ(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], w[i], 1e-15);
  std::vector<std::string> texts{"a", "b c", ""};
  auto batch = remote.embed_batch(texts);
  ASSERT_EQ(batch.size(), 3u);
  auto bc = local.embed("b c");
  ASSERT_EQ(batch[1].size(), bc.size());
  for (std::size_t i = 0; i < bc.size(); ++i) EXPECT_NEAR(batch[1][i], bc[i], 1e-15);
  EXPECT_TRUE(warnings.empty());
}

TEST(Remote, ServerWithoutEmbedderRefusesEmbedFrames) {
  Scripted none([](const GenerateRequest&) { return GenerateResponse{}; });
  GeneratorServer server(none);
  EXPECT_THROW(RemoteEmbedder(server.address()).embed("x"), ProtocolError);
}

TEST(Remote, ConcurrentClients) {
  std::vector<Document> docs{testing::boston()};
  auto onto = testing::ontology();
  OracleGenerator oracle(docs, onto);
  GeneratorServer server(oracle);
  const Document& d = docs[0];
  GenerateRequest req{render_input(d.event(1), d, onto.at("Attack"), nullptr), {}, kDefaultTopK};
  std::string want = oracle.generate(req).filled_text;
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&] {
      RemoteGenerator r(server.address());
      for (int i = 0; i < 10; ++i)
        if (r.generate(req).filled_text == want) ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 40);
}

}  // namespace
}  // namespace s2c
