#include <gtest/gtest.h>

#include <thread>

#include "ontoguard/backend.hpp"
#include "ontoguard/error.hpp"
#include "ontoguard/pipeline.hpp"
#include "support/test_support.hpp"

namespace ontoguard {
namespace {

using Step = ScriptedTransport::Step;

// The three response shapes quoted as model output examples.
const std::string kGrantText = "Access granted. Ensure to maintain data confidentiality.";
const std::string kDenyText = "Access denied. This is illegal.";
const std::string kRecommendText =
    "Need to seek patient's informed consent. Seek permission from ethics committee for special ethics approval.";

struct Fixture {
  Ontology onto = testing::bundled_ontology();
  AccessRequest request = testing::clinician_request();
  std::vector<ProvisionMatch> matches = applicable_provisions(onto, request);
  CaptureResult captured = capture_context(request);

  DecisionInput input() const { return {request, captured.attributes, captured.context, matches}; }
};

TEST(ParseResponse, PublishedExamples) {
  auto grant = parse_response(kGrantText).verdict;
  EXPECT_EQ(grant.kind, VerdictKind::Grant);
  EXPECT_EQ(grant.obligations, std::vector<std::string>{"Ensure to maintain data confidentiality."});
  EXPECT_TRUE(grant.recommendations.empty());

  auto deny = parse_response(kDenyText).verdict;
  EXPECT_EQ(deny.kind, VerdictKind::Deny);
  EXPECT_TRUE(deny.obligations.empty());
  EXPECT_TRUE(deny.recommendations.empty());

  auto advice = parse_response(kRecommendText).verdict;
  EXPECT_EQ(advice.kind, VerdictKind::Deny);
  EXPECT_EQ(advice.recommendations,
            (std::vector<std::string>{"Need to seek patient's informed consent.",
                                      "Seek permission from ethics committee for special ethics approval."}));
}

TEST(ParseResponse, StructuredForm) {
  auto v = parse_response(
               "access granted with conditions\n"
               "- obtain patient's informed consent\n"
               "Cited: mhra-2012/healthcare-provider-access (consent outstanding)\n")
               .verdict;
  EXPECT_EQ(v.kind, VerdictKind::ConditionalGrant);
  EXPECT_EQ(v.obligations, std::vector<std::string>{"obtain patient's informed consent"});
  ASSERT_EQ(v.rationale.size(), 1u);
  EXPECT_EQ(v.rationale[0].provision_id, "mhra-2012/healthcare-provider-access");
  EXPECT_EQ(v.rationale[0].detail, "consent outstanding");
}

TEST(ParseResponse, RefusesToGuess) {
  EXPECT_THROW(parse_response(""), UnparseableResponse);
  EXPECT_THROW(parse_response("   \n"), UnparseableResponse);
  EXPECT_THROW(parse_response("The weather is fine today."), UnparseableResponse);
  EXPECT_THROW(parse_response("{\"choices\": []}"), UnparseableResponse);
}

// Property: parse inverts the canonical renderer.
TEST(CanonicalRender, RoundTrip) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 1000; ++i) {
    Verdict v = testing::random_verdict(rng);
    ASSERT_EQ(parse_response(canonical_render(v)).verdict, v) << canonical_render(v);
  }
}

TEST(RenderPrompt, CarriesRequestContextAndProvisions) {
  Fixture f;
  auto prompt = render_prompt(f.request, f.matches, f.captured.context);
  EXPECT_NE(prompt.find("healthcare-provision"), std::string::npos);
  EXPECT_NE(prompt.find("mhra-2012/healthcare-provider-access"), std::string::npos);
  EXPECT_NE(prompt.find("situation=routine"), std::string::npos);
  EXPECT_TRUE(prompt.ends_with("Is access granted?\n"));
  EXPECT_NE(render_prompt(f.request, {}, f.captured.context).find("No authorizing provision matched."),
            std::string::npos);
}

TEST(DeterministicBackend, MatchesTheRuleEngine) {
  Fixture f;
  DeterministicBackend b;
  auto out = b.decide(f.input());
  EXPECT_EQ(out.verdict.kind, VerdictKind::Grant);
  EXPECT_FALSE(out.fault);
  EXPECT_FALSE(out.raw_response);
  EXPECT_TRUE(b.capabilities().deterministic);
}

TEST(MockBackend, ReplaysByRequestId) {
  Fixture f;
  auto mock = MockBackend::from_json(
      nlohmann::json{{"default", kDenyText}, {"responses", {{"req-test", kGrantText}}}});
  auto out = mock.decide(f.input());
  EXPECT_EQ(out.verdict.kind, VerdictKind::Grant);
  EXPECT_EQ(out.raw_response, kGrantText);

  Fixture other;
  other.request.request_id = "req-other";
  EXPECT_EQ(mock.decide(other.input()).verdict.kind, VerdictKind::Deny);
}

TEST(MockBackend, MissingScriptIsUnavailable) {
  Fixture f;
  MockBackend mock({}, std::nullopt);
  EXPECT_THROW(mock.decide(f.input()), BackendUnavailable);
  EXPECT_THROW(MockBackend::from_file("/nonexistent/mock.json"), BackendUnavailable);
  EXPECT_THROW(MockBackend::from_json(nlohmann::json::array()), BackendUnavailable);
}

TEST(MockBackend, GibberishFallsBack) {
  Fixture f;
  MockBackend mock({}, "lorem ipsum dolor");
  auto out = mock.decide(f.input());
  ASSERT_TRUE(out.fault);
  EXPECT_EQ(out.fault->kind, FaultKind::UnparseableResponse);
  EXPECT_EQ(out.verdict, deterministic_decide(f.input()).verdict);
}

TEST(LlmBackend, ParsesScriptedReplies) {
  Fixture f;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<Step>{{Step::Kind::Reply, kGrantText},
                                                                         {Step::Kind::Reply, kDenyText},
                                                                         {Step::Kind::Reply, kRecommendText}});
  LlmBackend llm(LlmConfig{}, transport);
  EXPECT_EQ(llm.id(), "llm:gpt-4");
  EXPECT_FALSE(llm.capabilities().deterministic);
  EXPECT_EQ(llm.decide(f.input()).verdict.kind, VerdictKind::Grant);
  EXPECT_EQ(llm.decide(f.input()).verdict.kind, VerdictKind::Deny);
  EXPECT_EQ(llm.decide(f.input()).verdict.recommendations.size(), 2u);
  ASSERT_EQ(transport->prompts().size(), 3u);
  EXPECT_EQ(transport->prompts()[0], render_prompt(f.request, f.matches, f.captured.context));
}

// Property: injected faults never escape; the rule engine's verdict is
// returned with the fault recorded.
TEST(LlmBackend, FallbackTotality) {
  Fixture f;
  const Verdict expected = deterministic_decide(f.input()).verdict;
  std::mt19937_64 rng(47);
  std::vector<Step> steps;
  for (int i = 0; i < 1000; ++i) {
    switch (i % 3) {
      case 0:
        steps.push_back({Step::Kind::Timeout, ""});
        break;
      case 1:
        steps.push_back({Step::Kind::TransportError, "connection reset"});
        break;
      default:
        steps.push_back({Step::Kind::Reply, testing::random_sentence(rng) + " " + std::to_string(i)});
    }
  }
  LlmBackend llm(LlmConfig{}, std::make_shared<ScriptedTransport>(steps, false));
  int faults = 0;
  for (int i = 0; i < 1000; ++i) {
    BackendVerdict out;
    ASSERT_NO_THROW(out = llm.decide(f.input()));
    ASSERT_TRUE(out.fault);
    ASSERT_TRUE(out.fault->fallback_used);
    const FaultKind want =
        i % 3 == 0 ? FaultKind::Timeout : i % 3 == 1 ? FaultKind::TransportError : FaultKind::UnparseableResponse;
    ASSERT_EQ(out.fault->kind, want);
    ASSERT_EQ(out.verdict, expected);
    ++faults;
  }
  EXPECT_EQ(faults, 1000);
  EXPECT_EQ(llm.decide(f.input()).fault->kind, FaultKind::TransportError);
}

TEST(LlmBackend, NoTransportFallsBack) {
  Fixture f;
  LlmBackend llm(LlmConfig{}, nullptr);
  auto out = llm.decide(f.input());
  ASSERT_TRUE(out.fault);
  EXPECT_EQ(out.fault->kind, FaultKind::TransportError);
}

TEST(LlmBackend, FaultMarksDecisionDeterministic) {
  Fixture f;
  LlmBackend llm(LlmConfig{}, std::make_shared<ScriptedTransport>(std::vector<Step>{{Step::Kind::Timeout, ""}}));
  auto d = decide(f.onto, f.request, {}, llm);
  EXPECT_TRUE(d.backend_deterministic);
  ASSERT_TRUE(d.backend_fault);
  EXPECT_EQ(d.backend_fault->kind, FaultKind::Timeout);
  EXPECT_TRUE(d.conflicts.empty());
}

TEST(LlmBackend, ConcurrentCallsAreSafe) {
  Fixture f;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<Step>{{Step::Kind::Reply, kGrantText}});
  LlmConfig config;
  config.max_in_flight = 2;
  LlmBackend llm(config, transport);
  std::vector<std::jthread> threads;
  std::atomic<int> grants = 0;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) grants += llm.decide(f.input()).verdict.kind == VerdictKind::Grant;
    });
  }
  threads.clear();
  EXPECT_EQ(grants.load(), 400);
  EXPECT_EQ(transport->prompts().size(), 400u);
}

TEST(ChatWire, RequestAndResponseShapes) {
  LlmConfig c;
  c.model = "gpt-4o";
  auto body = chat_request_body(c, "hello");
  EXPECT_EQ(body["model"], "gpt-4o");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(chat_response_text(R"({"choices":[{"message":{"role":"assistant","content":"Access denied."}}]})"),
            "Access denied.");
  EXPECT_THROW(chat_response_text("not json"), UnparseableResponse);
  EXPECT_THROW(chat_response_text(R"({"choices":[]})"), UnparseableResponse);
}

TEST(LlmConfig, FromEnvironment) {
  ::unsetenv("ONTOGUARD_LLM_BASE_URL");
  EXPECT_FALSE(LlmConfig::from_env());
  ::setenv("ONTOGUARD_LLM_BASE_URL", "http://127.0.0.1:9", 1);
  ::setenv("ONTOGUARD_LLM_MODEL", "local", 1);
  ::setenv("ONTOGUARD_LLM_TIMEOUT_MS", "250", 1);
  auto c = LlmConfig::from_env();
  ASSERT_TRUE(c);
  EXPECT_EQ(c->base_url, "http://127.0.0.1:9");
  EXPECT_EQ(c->model, "local");
  EXPECT_EQ(c->timeout, std::chrono::milliseconds(250));
  ::unsetenv("ONTOGUARD_LLM_BASE_URL");
  ::unsetenv("ONTOGUARD_LLM_MODEL");
  ::unsetenv("ONTOGUARD_LLM_TIMEOUT_MS");
}

}  // namespace
}  // namespace ontoguard
