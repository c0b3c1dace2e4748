import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuneilid.corpus import (
    LabeledCorpus,
    RawLine,
    balance_sample,
    dedup,
    export_split,
    filter_min_length,
    load_labeled,
    normalize_line,
    split_in_domain,
    split_out_of_domain,
)
from cuneilid.errors import (
    InsufficientLines,
    InvalidLabel,
    LabelTooSmall,
    MalformedUtf8,
    MissingLabel,
)

A, B = "𒀀𒁀", "𒀭𒂗𒆤"


class TestNormalizeLine:
    def test_whitespace_removed(self):
        assert normalize_line("𒀭 𒂗 𒆤") == "𒀭𒂗𒆤"
        assert len(normalize_line("𒀭 𒂗 𒆤")) == 3

    def test_broken_sign_elided(self):
        assert normalize_line("𒀭 x 𒆤") == "𒀭𒆤"

    def test_all_broken(self):
        assert normalize_line("x x") == ""

    def test_embedded_x_kept(self):
        assert normalize_line("𒀭x 𒆤") == "𒀭x𒆤"

    def test_raw_line_accepted(self):
        assert normalize_line(RawLine("x 𒀭\t𒆤　", 7)) == "𒀭𒆤"

    @given(st.text(alphabet="𒀀𒁀x \t\n "))
    def test_idempotent_and_no_whitespace(self, text):
        once = normalize_line(text)
        assert normalize_line(once) == once
        assert not any(ch.isspace() for ch in once)


class TestLoad:
    def test_two_lines(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("𒀭𒂗\tSUX\n𒁹𒌋\tNEA\n", encoding="utf-8")
        c = load_labeled(p)
        assert len(c) == 2
        assert c.label_set == ("SUX", "NEA")
        assert c.entries == [("𒀭𒂗", "SUX"), ("𒁹𒌋", "NEA")]

    def test_missing_label(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("𒀭𒂗\n", encoding="utf-8")
        with pytest.raises(MissingLabel) as exc:
            load_labeled(p)
        assert exc.value.line_no == 1

    def test_empty_label(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("𒀭𒂗\tSUX\n𒀭\t \n", encoding="utf-8")
        with pytest.raises(MissingLabel) as exc:
            load_labeled(p)
        assert exc.value.line_no == 2

    def test_label_with_space(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("𒀭𒂗\tS UX\n", encoding="utf-8")
        with pytest.raises(InvalidLabel):
            load_labeled(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_bytes(b"")
        c = load_labeled(p)
        assert len(c) == 0 and c.label_set == ()

    def test_bad_utf8(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_bytes("𒀭\tSUX\n".encode() + b"ab\xff\tNEA\n")
        with pytest.raises(MalformedUtf8) as exc:
            load_labeled(p)
        assert (exc.value.line_no, exc.value.byte_offset) == (2, 2)

    def test_text_is_normalized(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("𒀭 x 𒂗\tSUX\n", encoding="utf-8")
        assert load_labeled(p).lines == ("𒀭𒂗",)


class TestDedupFilter:
    def test_exact_duplicate(self):
        c = LabeledCorpus.from_entries([(A, "SUX"), (A, "SUX"), (B, "SUX")])
        assert dedup(c).entries == [(A, "SUX"), (B, "SUX")]

    def test_cross_label_repeat_kept(self):
        c = LabeledCorpus.from_entries([(A, "SUX"), (A, "NEA")])
        assert dedup(c) == c

    def test_empty(self):
        assert dedup(LabeledCorpus()) == LabeledCorpus()

    def test_min_length_boundary(self):
        c = LabeledCorpus.from_entries([("𒀀𒁀", "SUX"), ("𒀀𒁀𒀀", "SUX")])
        assert filter_min_length(c, 3).lines == ("𒀀𒁀𒀀",)

    def test_min_one_identity(self):
        c = LabeledCorpus.from_entries([(A, "SUX"), (B, "NEA")])
        assert filter_min_length(c, 1) == c

    def test_min_zero_rejected(self):
        with pytest.raises(ValueError):
            filter_min_length(LabeledCorpus(), 0)


def _single(n, label="SUX"):
    return LabeledCorpus(tuple(f"𒀀{i}" for i in range(n)), (label,) * n)


class TestSplits:
    def test_out_of_domain_eight(self):
        s = split_out_of_domain(_single(8))
        # index arithmetic: ceil(8/2)=4, ceil(4/2)=2
        assert s.train == (0, 1, 2, 3)
        assert s.dev == (4, 5)
        assert s.test == (6, 7)

    def test_out_of_domain_hundred(self):
        assert split_out_of_domain(_single(100)).sizes() == (50, 25, 25)

    def test_out_of_domain_four(self):
        assert split_out_of_domain(_single(4)).sizes() == (2, 1, 1)

    def test_too_small(self):
        with pytest.raises(LabelTooSmall):
            split_out_of_domain(_single(3))
        with pytest.raises(LabelTooSmall):
            split_in_domain(_single(3))

    def test_in_domain_forty(self):
        s = split_in_domain(_single(40))
        assert s.train == tuple(range(0, 10)) + tuple(range(20, 30))
        assert s.dev == tuple(range(10, 15)) + tuple(range(30, 35))
        assert s.test == tuple(range(15, 20)) + tuple(range(35, 40))

    def test_in_domain_twenty(self):
        assert split_in_domain(_single(20)).sizes() == (10, 5, 5)

    def test_in_domain_four(self):
        assert split_in_domain(_single(4)).sizes() == (2, 1, 1)

    def test_in_domain_partial_block(self):
        # 27 = one full block + 7: ceil(7/2)=4, ceil(3/2)=2, 1
        s = split_in_domain(_single(27))
        assert s.train == tuple(range(10)) + (20, 21, 22, 23)
        assert s.dev == tuple(range(10, 15)) + (24, 25)
        assert s.test == tuple(range(15, 20)) + (26,)

    def test_per_label_on_interleaved_file(self):
        c = LabeledCorpus(tuple(str(i) for i in range(8)), ("A", "B") * 4)
        s = split_out_of_domain(c)
        assert s.train == (0, 1, 2, 3)
        assert s.dev == (4, 5)
        assert s.test == (6, 7)

    def test_export(self, tmp_path):
        c = _single(8)
        paths = export_split(c, split_out_of_domain(c), tmp_path / "cli")
        assert [p.name for p in paths] == ["cli.train.tsv", "cli.dev.tsv", "cli.test.tsv"]
        assert load_labeled(paths[1]).lines == ("𒀀4", "𒀀5")


class TestBalance:
    def test_exact_counts(self):
        c = LabeledCorpus(tuple(str(i) for i in range(30)), ("A",) * 10 + ("B",) * 20)
        out = balance_sample(c, 7, seed=3)
        assert out.labels.count("A") == 7 and out.labels.count("B") == 7

    def test_seeded_reproducible(self):
        c = LabeledCorpus(tuple(str(i) for i in range(50)), ("A", "B") * 25)
        assert balance_sample(c, 10, seed=1) == balance_sample(c, 10, seed=1)
        assert balance_sample(c, 10, seed=1) != balance_sample(c, 10, seed=2)

    def test_whole_class(self):
        c = LabeledCorpus(tuple(str(i) for i in range(15)), ("A",) * 5 + ("B",) * 10)
        out = balance_sample(c, 5, seed=0)
        assert [line for line, g in out if g == "A"] == [str(i) for i in range(5)]

    def test_output_order(self):
        c = LabeledCorpus(tuple(str(i) for i in range(12)), ("B", "A") * 6)
        out = balance_sample(c, 3, seed=9)
        assert out.labels == ("B",) * 3 + ("A",) * 3
        for g in "AB":
            idx = [int(line) for line, label in out if label == g]
            assert idx == sorted(idx)

    def test_insufficient(self):
        c = LabeledCorpus(("1", "2"), ("A", "A"))
        with pytest.raises(InsufficientLines) as exc:
            balance_sample(c, 3)
        assert (exc.value.have, exc.value.need) == (2, 3)

    def test_balanced_set_sizes(self):
        labels = ("SUX", "OLB", "MPB", "STB", "NEB", "LTB", "NEA")
        c = LabeledCorpus(
            tuple(f"l{i}" for i in range(7 * 1000)), tuple(g for g in labels for _ in range(1000))
        )
        assert len(balance_sample(c, 668, seed=0)) == 4676
        assert len(balance_sample(c, 985, seed=0)) == 6895


@st.composite
def corpora(draw, min_per_label=0):
    n_labels = draw(st.integers(1, 3))
    sizes = [draw(st.integers(min_per_label, 30)) for _ in range(n_labels)]
    entries = [(f"𒀀{i}", f"L{g}") for g, n in enumerate(sizes) for i in range(n)]
    order = draw(st.permutations(range(len(entries))))
    return LabeledCorpus.from_entries([entries[i] for i in order])


@given(corpora(min_per_label=4))
def test_split_partition_property(corpus):
    groups = corpus.indices_by_label()
    for splitter in (split_out_of_domain, split_in_domain):
        s = splitter(corpus)
        assert not set(s.train) & set(s.dev)
        assert not set(s.train) & set(s.test)
        assert not set(s.dev) & set(s.test)
        for idx in groups.values():
            members = set(idx)
            assert (set(s.train) | set(s.dev) | set(s.test)) & members == members
    s = split_out_of_domain(corpus)
    for idx in groups.values():
        n = len(idx)
        assert len(set(s.train) & set(idx)) == math.ceil(n / 2)
