#include <catch2/catch_amalgamated.hpp>

#include "czcite/common.hpp"
#include "czcite/csv.hpp"
#include "czcite/io.hpp"
#include "czcite/text.hpp"
#include "support/testutil.hpp"

using namespace czcite;

TEST_CASE("utf8 decode/encode round trips Czech text") {
    std::string s = "Ústavní soud čj. Řízení ŽLUŤOUČKÝ";
    std::size_t i = 0;
    std::string rebuilt;
    while (i < s.size()) {
        std::size_t len;
        uint32_t cp = utf8_decode(s, i, len);
        utf8_encode(cp, rebuilt);
        i += len;
    }
    CHECK(rebuilt == s);
}

TEST_CASE("utf8_decode treats malformed bytes as single-byte codepoints") {
    std::string s = "a\xC3 b"; // dangling lead byte
    std::size_t len;
    CHECK(utf8_decode(s, 0, len) == 'a');
    CHECK(len == 1);
    utf8_decode(s, 1, len);
    CHECK(len == 1); // malformed: consume one byte, keep going
}

TEST_CASE("case mapping covers the Czech alphabet") {
    CHECK(to_lower("PŘÍLIŠ ŽLUŤOUČKÝ KŮŇ ÚPĚL ĎÁBELSKÉ ÓDY") ==
          "příliš žluťoučký kůň úpěl ďábelské ódy");
    CHECK(to_lower("Cdo") == "cdo");
    CHECK(to_lower("ÚS") == "ús");
    CHECK(to_lower("NSČR") == "nsčr");
}

TEST_CASE("codepoint classes cover ASCII and Czech letters") {
    CHECK(cp_is_upper(U'A'));
    CHECK(cp_is_upper(0x00DA)); // Ú
    CHECK(cp_is_upper(0x010C)); // Č
    CHECK(cp_is_lower(0x010D)); // č
    CHECK(cp_is_lower(U'z'));
    CHECK(cp_is_letter(0x017E)); // ž
    CHECK_FALSE(cp_is_letter(U'3'));
    CHECK_FALSE(cp_is_letter(U'/'));
    CHECK_FALSE(cp_is_upper(0x00D7)); // multiplication sign sits between Latin-1 uppers
}

TEST_CASE("starts_upper_or_digit sees multibyte uppercase") {
    CHECK(starts_upper_or_digit("Ústavní"));
    CHECK(starts_upper_or_digit("22 Cdo"));
    CHECK_FALSE(starts_upper_or_digit("ústavní"));
    CHECK_FALSE(starts_upper_or_digit("  x"));
    CHECK_FALSE(starts_upper_or_digit(""));
}

TEST_CASE("token_shape compresses character runs") {
    CHECK(token_shape("Cdo") == "Xx");
    CHECK(token_shape("2045/2012") == "9/9");
    CHECK(token_shape("sp.") == "x.");
    CHECK(token_shape("ÚS") == "X");
    CHECK(token_shape("I.") == "X.");
    CHECK(token_shape("NSČR") == "X");
    CHECK(token_shape("Abc123") == "Xx9");
    CHECK(token_shape("") == "");
}

TEST_CASE("trim and collapse_whitespace") {
    CHECK(trim("  x \t\n") == "x");
    CHECK(trim("") == "");
    CHECK(collapse_whitespace("  sp.   zn.\t22  Cdo ") == "sp. zn. 22 Cdo");
    CHECK(collapse_whitespace("a\nb") == "a b");
}

TEST_CASE("date parsing is strict ISO-8601 with calendar checks") {
    Date d = parse_date("2012-02-29");
    CHECK(d.year == 2012);
    CHECK(d.month == 2);
    CHECK(d.day == 29);
    CHECK(d.to_string() == "2012-02-29");
    CHECK_THROWS_AS(parse_date("2013-02-29"), DataError);
    CHECK_THROWS_AS(parse_date("2013-13-01"), DataError);
    CHECK_THROWS_AS(parse_date("2013-00-10"), DataError);
    CHECK_THROWS_AS(parse_date("2013-1-01"), DataError);
    CHECK_THROWS_AS(parse_date("2013/01/01"), DataError);
    CHECK_THROWS_AS(parse_date("20130101"), DataError);
    CHECK(parse_date("1993-01-01") < parse_date("2018-09-30"));
}

TEST_CASE("csv fields quote per RFC 4180") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");

    std::string out;
    csv_append_row(out, {"a", "b,c", "d\"e"});
    CHECK(out == "a,\"b,c\",\"d\"\"e\"\n");

    auto rows = csv_parse(out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
}

TEST_CASE("csv_parse handles quoted newlines, CRLF, and errors") {
    auto rows = csv_parse("x,\"a\nb\",z\r\n1,2,3\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][1] == "a\nb");
    CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
    CHECK_THROWS_AS(csv_parse("\"unterminated"), DataError);
}

TEST_CASE("jsonl io round trips with line numbers on errors") {
    auto dir = testutil::scratch_dir("io_jsonl");
    write_file(dir / "ok.jsonl", "{\"a\":1}\n\n{\"b\":\"x\"}\n");
    auto rows = read_jsonl_rows(dir / "ok.jsonl");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == 1);
    CHECK(rows[1].first == 3); // blank line skipped but counted
    CHECK(rows[1].second.at("b").get<std::string>() == "x");

    write_file(dir / "bad.jsonl", "{\"a\":1}\n{oops\n");
    CHECK_THROWS_WITH(read_jsonl_rows(dir / "bad.jsonl"), Catch::Matchers::ContainsSubstring(":2"));

    write_file(dir / "arr.jsonl", "[1,2]\n");
    CHECK_THROWS_WITH(read_jsonl_rows(dir / "arr.jsonl"),
                      Catch::Matchers::ContainsSubstring("object"));
}

TEST_CASE("atomic writes leave no temp file behind") {
    auto dir = testutil::scratch_dir("io_atomic");
    write_file_atomic(dir / "out.txt", "content");
    CHECK(read_file(dir / "out.txt") == "content");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
}

TEST_CASE("json field accessors name the context in errors") {
    ojson row = ojson::parse(R"({"s":"v","n":3,"neg":-1})");
    CHECK(json_string(row, "s", "ctx") == "v");
    CHECK(json_size(row, "n", "ctx") == 3);
    CHECK_THROWS_WITH(json_string(row, "missing", "file:7"),
                      Catch::Matchers::ContainsSubstring("file:7"));
    CHECK_THROWS_AS(json_string(row, "n", "ctx"), DataError);
    CHECK_THROWS_AS(json_size(row, "neg", "ctx"), DataError);
    CHECK_THROWS_AS(json_size(row, "s", "ctx"), DataError);
}
