#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "clid/synthetic.hpp"
#include "support.hpp"

namespace clid {
namespace {

using test::error_code_of;

std::string le_float(float f) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
  std::string out(4, '\0');
  for (int b = 0; b < 4; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  return out;
}

TEST(TextFormat, ParsesHeaderAndVectors) {
  const auto store = parse_text("2 3\ncat 1 0 0\ndog 0 1 0");
  EXPECT_EQ(store.dimension(), 3u);
  EXPECT_EQ(store.vocabulary_size(), 2u);
  const auto cat = store.lookup("cat");
  EXPECT_EQ(std::vector<double>(cat.begin(), cat.end()), (std::vector<double>{1, 0, 0}));
  EXPECT_TRUE(store.contains("dog"));
  EXPECT_FALSE(store.contains("cow"));
}

TEST(TextFormat, NanReportsLineTwo) {
  try {
    (void)parse_text("1 2\ncat 1 nan");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteComponent);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(TextFormat, Rejections) {
  EXPECT_EQ(error_code_of([] { (void)parse_text("x 3\ncat 1 0 0"); }), Errc::MalformedHeader);
  EXPECT_EQ(error_code_of([] { (void)parse_text(""); }), Errc::MalformedHeader);
  EXPECT_EQ(error_code_of([] { (void)parse_text("1 3\ncat 1 0"); }), Errc::WrongComponentCount);
  EXPECT_EQ(error_code_of([] { (void)parse_text("1 2\ncat 1 x"); }), Errc::MalformedComponent);
  EXPECT_EQ(error_code_of([] { (void)parse_text("2 1\ncat 1\ncat 2"); }), Errc::DuplicateToken);
  EXPECT_EQ(error_code_of([] { (void)parse_text("3 1\ncat 1\ndog 2"); }), Errc::EntryCountMismatch);
  try {
    (void)parse_text("3 1\na 1\nb 2\nb 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateToken);
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(TextFormat, GeneratedStoreRoundTrips) {
  const auto store = synthetic::embeddings(50, 300, 11);
  test::TempDir dir;
  write_text(store, dir / "e.txt");
  EXPECT_EQ(load_text(dir / "e.txt"), store);
}

TEST(BinaryFormat, SingleEntry) {
  const std::string bytes = "1 2\na " + le_float(1.0f) + le_float(2.0f);
  const auto store = parse_binary(bytes);
  const auto a = store.lookup("a");
  EXPECT_EQ(a[0], 1.0);
  EXPECT_EQ(a[1], 2.0);
}

TEST(BinaryFormat, OptionalNewlineBetweenEntries) {
  const std::string bytes =
      "2 1\na " + le_float(0.5f) + "\nb " + le_float(-3.25f) + "\n";
  const auto store = parse_binary(bytes);
  EXPECT_EQ(store.lookup("b")[0], -3.25);
}

TEST(BinaryFormat, TruncatedMidVectorNamesWord) {
  const std::string bytes = "1 2\na " + le_float(1.0f) + le_float(2.0f).substr(0, 2);
  try {
    (void)parse_binary(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TruncatedEntry);
    EXPECT_EQ(e.subject(), "a");
  }
}

TEST(BinaryFormat, Rejections) {
  const std::string one = "a " + le_float(1.0f);
  EXPECT_EQ(error_code_of([&] { (void)parse_binary("2 1\n" + one); }), Errc::EntryCountMismatch);
  EXPECT_EQ(error_code_of([&] { (void)parse_binary("1 1\n" + one + "b " + le_float(1.0f)); }),
            Errc::EntryCountMismatch);
  BinaryLoadOptions tight;
  tight.max_token_bytes = 3;
  EXPECT_EQ(error_code_of([&] { (void)parse_binary("1 1\nabcd " + le_float(1.0f), tight); }),
            Errc::TokenTooLong);
  EXPECT_EQ(error_code_of([&] { (void)parse_binary("1 1\na " + le_float(NAN)); }),
            Errc::NonFiniteComponent);
}

TEST(BinaryFormat, RoundTripIsBitExact) {
  const auto store = synthetic::float32_embeddings(200, 50, 5);
  test::TempDir dir;
  write_binary(store, dir / "e.bin");
  const auto back = load_binary(dir / "e.bin");
  ASSERT_EQ(back.vocabulary_size(), store.vocabulary_size());
  for (std::size_t i = 0; i < store.vocabulary_size(); ++i) {
    EXPECT_EQ(back.token_at(i), store.token_at(i));
    const auto x = store.vector_at(i);
    const auto y = back.vector_at(i);
    EXPECT_EQ(std::memcmp(x.data(), y.data(), x.size_bytes()), 0);
  }
}

TEST(BinaryFormat, IndependentSerializerAgrees) {
  // Hand-built bytes in the on-disk layout, compared to what write_binary emits.
  const auto store = test::make_store({{"hi", {0.25, -1.5}}, {"yo", {3.0, 0.0}}});
  std::string expected = "2 2\n";
  expected += "hi " + le_float(0.25f) + le_float(-1.5f) + "\n";
  expected += "yo " + le_float(3.0f) + le_float(0.0f) + "\n";
  test::TempDir dir;
  write_binary(store, dir / "e.bin");
  EXPECT_EQ(test::slurp(dir / "e.bin"), expected);
}

TEST(WordDistance, AxisExamples) {
  const auto store = test::axis_store();
  EXPECT_EQ(word_distance(store, "cat", "cat"), 0.0);
  EXPECT_NEAR(word_distance(store, "cat", "dog"), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(error_code_of([&] { (void)word_distance(store, "cat", "cow"); }),
            Errc::OutOfVocabulary);
}

TEST(WordDistance, MatchesSumOfSquaresReference) {
  const auto store = synthetic::embeddings(20, 300, 3);
  for (std::size_t i = 0; i + 1 < store.vocabulary_size(); ++i) {
    const auto a = store.vector_at(i);
    const auto b = store.vector_at(i + 1);
    long double acc = 0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const long double diff = static_cast<long double>(a[d]) - b[d];
      acc += diff * diff;
    }
    const double ref = static_cast<double>(std::sqrt(acc));
    EXPECT_NEAR(word_distance(store, store.token_at(i), store.token_at(i + 1)), ref, 1e-12 * ref);
  }
}

TEST(Store, ScaledMultipliesComponents) {
  const auto store = test::axis_store().scaled(2.5);
  EXPECT_EQ(store.lookup("dog")[1], 2.5);
  EXPECT_EQ(store.index_of("zzz"), EmbeddingStore::npos);
}

TEST(Store, ConstructorValidates) {
  EXPECT_EQ(error_code_of([] { (void)EmbeddingStore(2, {"a"}, {1.0}); }),
            Errc::WrongComponentCount);
  EXPECT_EQ(error_code_of([] { (void)EmbeddingStore(1, {"a", "a"}, {1.0, 2.0}); }),
            Errc::DuplicateToken);
}

}  // namespace
}  // namespace clid
