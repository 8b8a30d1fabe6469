#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <replikk/corpus.hpp>
#include <replikk/errors.hpp>

#include "support/synthetic.hpp"

using namespace replikk;
using namespace replikk::testsupport;

namespace {

std::string message_of(const std::exception& e) { return e.what(); }

} // namespace

TEST_SUITE("corpus") {

TEST_CASE("save and load round-trip all fields") {
    temp_dir dir("corpus");
    corpus original = make_balanced_corpus(3);
    original.sentences[0].annotator_labels = {{"a1", sentiment_label::pos},
                                              {"a2", sentiment_label::mix}};
    original = stratified_split(original, 9);

    std::string path = dir.file("roundtrip.jsonl");
    save_corpus(path, original, true);
    corpus loaded = load_corpus(path);

    REQUIRE(loaded.sentences.size() == original.sentences.size());
    for (std::size_t i = 0; i < loaded.sentences.size(); ++i) {
        const labeled_sentence& a = original.sentences[i];
        const labeled_sentence& b = loaded.sentences[i];
        CHECK(a.id == b.id);
        CHECK(a.text == b.text);
        CHECK(a.gold == b.gold);
        CHECK(a.intensity == b.intensity);
        CHECK(a.annotator_labels == b.annotator_labels);
        CHECK(a.comment_id == b.comment_id);
    }
    CHECK(loaded.split_assignment == original.split_assignment);

    // Saving without the split drops the assignment on reload.
    save_corpus(dir.file("nosplit.jsonl"), original, false);
    CHECK_FALSE(load_corpus(dir.file("nosplit.jsonl")).has_split());
}

TEST_CASE("load errors carry the line number") {
    temp_dir dir("corpus");
    std::string path = dir.file("broken.jsonl");
    write_text_file(path,
                    R"({"id":"s1","text":"Grei sak .","gold":"pos"})"
                    "\n"
                    R"({"id":"s2","text":"Trist sak .","gold":"neg"})"
                    "\n"
                    "not json at all\n");
    try {
        load_corpus(path);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(message_of(e).find("line 3") != std::string::npos);
    }
}

TEST_CASE("duplicate ids are rejected") {
    temp_dir dir("corpus");
    std::string path = dir.file("dup.jsonl");
    write_text_file(path,
                    R"({"id":"s1","text":"En sak .","gold":"pos"})"
                    "\n"
                    R"({"id":"s1","text":"Annen sak .","gold":"neg"})"
                    "\n");
    try {
        load_corpus(path);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(message_of(e).find("s1") != std::string::npos);
    }
}

TEST_CASE("unknown labels and missing fields are data errors") {
    temp_dir dir("corpus");
    write_text_file(dir.file("badlabel.jsonl"),
                    R"({"id":"s1","text":"Sak .","gold":"positive"})"
                    "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("badlabel.jsonl")), data_error);

    write_text_file(dir.file("notext.jsonl"), R"({"id":"s1","gold":"pos"})"
                                              "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("notext.jsonl")), data_error);

    CHECK_THROWS_AS(load_corpus(dir.file("missing.jsonl")), data_error);
}

TEST_CASE("split fields are all-or-nothing") {
    temp_dir dir("corpus");
    write_text_file(dir.file("partial.jsonl"),
                    R"({"id":"s1","text":"En sak .","gold":"pos","split":"train"})"
                    "\n"
                    R"({"id":"s2","text":"To sak .","gold":"neg"})"
                    "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("partial.jsonl")), data_error);
}

TEST_CASE("distribution_of counts per class") {
    corpus fixture = make_corpus({{sentiment_label::pos, 5},
                                  {sentiment_label::neg, 3},
                                  {sentiment_label::mix, 1}});
    class_distribution dist = distribution_of(fixture.sentences);
    CHECK(dist[sentiment_label::pos] == 5);
    CHECK(dist[sentiment_label::neg] == 3);
    CHECK(dist[sentiment_label::neut] == 0);
    CHECK(dist[sentiment_label::mix] == 1);
}

TEST_CASE("stratified_split is a balanced deterministic partition") {
    corpus fixture = make_corpus({{sentiment_label::pos, 11},
                                  {sentiment_label::neg, 10},
                                  {sentiment_label::neut, 3},
                                  {sentiment_label::mix, 1}});
    corpus split = stratified_split(fixture, 42);
    REQUIRE(split.has_split());
    CHECK(split.split_assignment.size() == fixture.sentences.size());

    class_distribution train = distribution_of(split.subset(split_tag::train));
    class_distribution test = distribution_of(split.subset(split_tag::test));
    for (sentiment_label label : canonical_labels) {
        std::size_t lhs = train.count(label) ? train[label] : 0;
        std::size_t rhs = test.count(label) ? test[label] : 0;
        CHECK(lhs + rhs == distribution_of(fixture.sentences)[label]);
        CHECK((lhs > rhs ? lhs - rhs : rhs - lhs) <= 1);
    }
    // Odd classes put the extra sentence in TEST.
    CHECK(train[sentiment_label::pos] == 5);
    CHECK(test[sentiment_label::pos] == 6);
    CHECK(train[sentiment_label::neut] == 1);
    CHECK(test[sentiment_label::neut] == 2);
    CHECK(train[sentiment_label::mix] == 0);
    CHECK(test[sentiment_label::mix] == 1);

    corpus again = stratified_split(fixture, 42);
    CHECK(again.split_assignment == split.split_assignment);

    validate_split(split);
}

TEST_CASE("different seeds give different assignments") {
    corpus fixture = make_balanced_corpus(100);
    corpus a = stratified_split(fixture, 1);
    corpus b = stratified_split(fixture, 2);
    CHECK(a.split_assignment != b.split_assignment);
}

TEST_CASE("distribution additivity over the split") {
    corpus fixture = make_balanced_corpus(25, 3);
    corpus split = stratified_split(fixture, 17);
    class_distribution train = distribution_of(split.subset(split_tag::train));
    class_distribution test = distribution_of(split.subset(split_tag::test));
    class_distribution full = distribution_of(split.sentences);
    for (sentiment_label label : canonical_labels) {
        CHECK(train[label] + test[label] == full[label]);
    }
}

TEST_CASE("validator accepts the published distribution and its off-by-two") {
    corpus published = published_distribution_corpus();
    class_distribution train = distribution_of(published.subset(split_tag::train));
    class_distribution test = distribution_of(published.subset(split_tag::test));
    CHECK(train[sentiment_label::pos] == 1396);
    CHECK(test[sentiment_label::pos] == 1396);
    CHECK(train[sentiment_label::neg] == 1753);
    CHECK(test[sentiment_label::neg] == 1755);
    CHECK(train[sentiment_label::neut] == 476);
    CHECK(test[sentiment_label::neut] == 477);
    CHECK(train[sentiment_label::mix] == 220);
    CHECK(test[sentiment_label::mix] == 220);

    validate_split(published); // neg differs by 2, tolerance is 2

    // Push one more negative sentence into TEST: difference 4 must fail.
    corpus skewed = published;
    for (const labeled_sentence& sentence : skewed.sentences) {
        if (sentence.gold == sentiment_label::neg &&
            skewed.split_assignment[sentence.id] == split_tag::train) {
            skewed.split_assignment[sentence.id] = split_tag::test;
            break;
        }
    }
    try {
        validate_split(skewed);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(message_of(e).find("neg") != std::string::npos);
    }
}

TEST_CASE("our generator keeps the published class balance within one per class") {
    corpus published = published_distribution_corpus();
    corpus unsplit;
    unsplit.sentences = published.sentences;
    corpus resplit = stratified_split(unsplit, 123);
    class_distribution train = distribution_of(resplit.subset(split_tag::train));
    class_distribution test = distribution_of(resplit.subset(split_tag::test));
    for (sentiment_label label : canonical_labels) {
        std::size_t lhs = train[label];
        std::size_t rhs = test[label];
        CHECK((lhs > rhs ? lhs - rhs : rhs - lhs) <= 1);
    }
    // Odd neutral count: the extra sentence lands in TEST.
    CHECK(test[sentiment_label::neut] == train[sentiment_label::neut] + 1);
}

TEST_CASE("binary_subset keeps order and drops neut and mix") {
    corpus fixture = make_balanced_corpus(2);
    std::vector<labeled_sentence> binary = binary_subset(fixture.sentences);
    CHECK(binary.size() == 4);
    std::vector<std::string> expected_ids;
    for (const labeled_sentence& sentence : fixture.sentences) {
        if (sentence.gold == sentiment_label::pos || sentence.gold == sentiment_label::neg) {
            expected_ids.push_back(sentence.id);
        }
    }
    std::vector<std::string> actual_ids;
    for (const labeled_sentence& sentence : binary) actual_ids.push_back(sentence.id);
    CHECK(actual_ids == expected_ids);
}

} // TEST_SUITE("corpus")
