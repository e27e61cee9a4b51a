import json

import pytest

from tmclean.cli import main
from tmclean.core import Label, LabeledUnit, TranslationUnit
from tmclean.ingestion import write_tmx, write_tsv
from tmclean.synthetic import make_corpus

G = ["--glossary", "bundled:en-de"]


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    corpus = make_corpus(300, seed=8)
    write_tsv(d / "train.tsv", corpus.units)
    assert main(["train", str(d / "train.tsv"), "--model", str(d / "model.json"), "--trees", "25", *G]) == 0
    return d, corpus


def run(*argv):
    return main([str(a) for a in argv])


def test_stats(tmp_path, capsys):
    units = [LabeledUnit(TranslationUnit(str(i), "en", "de", "a", "b"), Label(l)) for i, l in enumerate([1, 1, 2, 3])]
    write_tsv(tmp_path / "d.tsv", units)
    assert run("stats", tmp_path / "d.tsv", "--json", tmp_path / "s.json") == 0
    out = capsys.readouterr().out
    assert "total" in out and "4" in out
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["class_counts"] == {"1": 2, "2": 1, "3": 1} and doc["total"] == 4


def test_stats_empty_file(tmp_path, capsys):
    (tmp_path / "e.tsv").write_text("# nothing\n")
    assert run("stats", tmp_path / "e.tsv") == 0
    assert "0" in capsys.readouterr().out


def test_stats_unlabeled_is_data_error(tmp_path):
    (tmp_path / "u.tsv").write_text("1\ten\tde\ta\tb\n")
    assert run("stats", tmp_path / "u.tsv") == 2


def test_usage_errors_exit_1(tmp_path):
    assert run("bogus") == 1
    assert run("train") == 1
    (tmp_path / "c.json").write_text('{"unknown_key": 1}')
    assert run("stats", tmp_path / "x.tsv", "--config", tmp_path / "c.json") == 1


def test_missing_mt_provider_fails_before_extraction(work, tmp_path):
    d, _ = work
    assert run("train", d / "train.tsv", "--model", tmp_path / "m.json") == 1
    assert not (tmp_path / "m.json").exists()


def test_train_is_deterministic(work, tmp_path):
    d, _ = work
    assert run("train", d / "train.tsv", "--model", tmp_path / "again.json", "--trees", "25", *G) == 0
    assert (tmp_path / "again.json").read_bytes() == (d / "model.json").read_bytes()


def test_predict(work, tmp_path):
    d, corpus = work
    units = [lu.unit for lu in corpus.units[:40]]
    write_tsv(d / "unl.tsv", units)
    assert run("predict", d / "unl.tsv", "--model", d / "model.json", "--out", tmp_path / "p.tsv", *G) == 0
    lines = (tmp_path / "p.tsv").read_text().splitlines()
    assert lines[0] == "id\tpredicted\tp_0\tp_1"
    assert [l.split("\t")[0] for l in lines[1:]] == [u.id for u in units]
    for line in lines[1:]:
        _, cls, p0, p1 = line.split("\t")
        assert abs(float(p0) + float(p1) - 1) < 1e-9
        assert int(cls) == (0 if float(p0) >= float(p1) else 1)


def test_predict_schema_mismatch_via_features_flag_is_ignored(work, tmp_path):
    # the model's own schema always wins over --features
    d, corpus = work
    write_tsv(d / "one.tsv", [corpus.units[0].unit])
    assert run("predict", d / "one.tsv", "--model", d / "model.json", "--features", "cg_score", *G) == 0


def test_evaluate(work, tmp_path, capsys):
    d, corpus = work
    assert run("evaluate", d / "train.tsv", "--model", d / "model.json", "--out", tmp_path / "r.json", *G) == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["weighted"]["f1"] == 1.0
    assert doc["correctly_classified"] == len(corpus.units)
    assert doc["meta"]["schema"]["names"][0] == "ratio_words"
    assert "mt=glossary:" in doc["meta"]["providers"]["mt_bleu"]
    assert "weighted" in capsys.readouterr().out


def test_cv_json_is_byte_identical(work, tmp_path):
    d, _ = work
    args = ["cv", d / "train.tsv", "--trees", "10", "--repetitions", "2", "--seed", "3", *G]
    assert run(*args, "--out", tmp_path / "a.json") == 0
    assert run(*args, "--workers", "2", "--out", tmp_path / "b.json") == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_config_file_and_flag_precedence(work, tmp_path):
    d, _ = work
    cfg = {"mt": {"kind": "glossary", "glossary": "bundled:en-de"}, "forest": {"n_trees": 3}, "seed": 1}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert run("train", d / "train.tsv", "--model", tmp_path / "m.json", "--config", tmp_path / "c.json", "--trees", "4") == 0
    doc = json.loads((tmp_path / "m.json").read_text())
    assert doc["hyperparameters"]["n_trees"] == 4 and doc["hyperparameters"]["rng_seed"] == 1


def test_mt_cache_flag(work, tmp_path):
    d, corpus = work
    distinct = len({lu.unit.source_text for lu in corpus.units})
    cache = tmp_path / "mt.jsonl"
    assert run("extract", d / "train.tsv", "--out", tmp_path / "f.tsv", "--mt-cache", cache, *G) == 0
    assert cache.exists() and len(cache.read_text().splitlines()) == distinct
    assert run("extract", d / "train.tsv", "--out", tmp_path / "g.tsv", "--mt-cache", cache, *G) == 0
    assert (tmp_path / "f.tsv").read_bytes() == (tmp_path / "g.tsv").read_bytes()
    assert len(cache.read_text().splitlines()) == distinct


def _tm_lines(path):
    return [l for l in path.read_text(encoding="utf-8").splitlines()]


@pytest.mark.parametrize("threshold", ["0", "0.5", "1"])
def test_clean_partitions_input(work, tmp_path, threshold):
    d, corpus = work
    src = d / "tm.tsv"
    write_tsv(src, [lu.unit for lu in corpus.units[:80]])
    with open(src, "a", encoding="utf-8") as fh:
        fh.write("broken row\n")
    kept, rej, summ = tmp_path / "k.tsv", tmp_path / "r.tsv", tmp_path / "s.json"
    assert run("clean", src, "--model", d / "model.json", "--kept", kept, "--rejected", rej,
               "--summary", summ, "--threshold", threshold, *G) == 0
    inp = _tm_lines(src)
    k, r = _tm_lines(kept), _tm_lines(rej)
    assert sorted(k + r) == sorted(inp) and not set(k) & set(r)
    s = json.loads(summ.read_text())
    assert s["kept"] == len(k) and s["rejected"] == len(r) and s["input"] == len(inp)
    assert "broken row" in r
    for rec in s["rejections"]:
        if rec["reason"] == "classifier":
            p = rec["p_invalid"]
            assert p > float(threshold) or p == 1.0


def test_clean_threshold_boundaries(work, tmp_path):
    d, corpus = work
    src = d / "tm2.tsv"
    write_tsv(src, [lu.unit for lu in corpus.units[:120]])
    counts = {}
    for t in ("0", "1"):
        assert run("clean", src, "--model", d / "model.json", "--kept", tmp_path / f"k{t}", "--rejected",
                   tmp_path / f"r{t}", "--summary", tmp_path / f"s{t}", "--threshold", t, *G) == 0
        counts[t] = json.loads((tmp_path / f"s{t}").read_text())["rejections"]
    assert all(r["p_invalid"] > 0 for r in counts["0"])
    assert all(r["p_invalid"] == 1.0 for r in counts["1"])
    assert len(counts["1"]) <= len(counts["0"])


def test_clean_rejects_fine_grained_model(work, tmp_path):
    d, _ = work
    model = tmp_path / "fg.json"
    assert run("train", d / "train.tsv", "--model", model, "--task", "fine-grained", "--trees", "3", *G) == 0
    assert run("clean", d / "train.tsv", "--model", model, "--kept", tmp_path / "k", "--rejected", tmp_path / "r", *G) == 2


def test_clean_strict_fails_on_bad_row(work, tmp_path):
    d, _ = work
    (tmp_path / "bad.tsv").write_text("only\ttwo\n")
    assert run("clean", tmp_path / "bad.tsv", "--model", d / "model.json", "--kept", tmp_path / "k",
               "--rejected", tmp_path / "r", "--strict", *G) == 2


def test_clean_tmx_preserves_elements(work, tmp_path):
    d, corpus = work
    units = [lu.unit for lu in corpus.units[:30]]
    write_tmx(tmp_path / "tm.tmx", units)
    text = (tmp_path / "tm.tmx").read_text(encoding="utf-8")
    text = text.replace("</body>", '<tu tuid="lonely"><tuv xml:lang="en"><seg>only <b>English</b></seg></tuv></tu></body>')
    (tmp_path / "tm.tmx").write_text(text, encoding="utf-8")
    kept, rej = tmp_path / "k.tmx", tmp_path / "r.tmx"
    assert run("clean", tmp_path / "tm.tmx", "--model", d / "model.json", "--kept", kept, "--rejected", rej,
               "--src-lang", "en", "--tgt-lang", "de", *G) == 0
    from tmclean.ingestion import read_tmx

    k = read_tmx(kept, "en", "de")
    r = read_tmx(rej, "en", "de", strict=False)
    assert sorted(u.id for u in k + r) == sorted(u.id for u in units)
    assert "<b>English</b>" in rej.read_text(encoding="utf-8")
    by_id = {u.id: u for u in units}
    assert all(by_id[u.id] == u for u in k + r)


def test_clean_tmx_needs_languages(work, tmp_path):
    d, corpus = work
    write_tmx(tmp_path / "tm.tmx", [corpus.units[0].unit])
    assert run("clean", tmp_path / "tm.tmx", "--model", d / "model.json", "--kept", tmp_path / "k",
               "--rejected", tmp_path / "r", *G) == 1


def test_select_features_command(work, tmp_path):
    d, _ = work
    assert run("select-features", d / "train.tsv", "--candidates", "cg_score,mt_bleu,ratio_words", "--trees", "5",
               "--repetitions", "2", "--out", tmp_path / "sel.json", *G) == 0
    doc = json.loads((tmp_path / "sel.json").read_text())
    assert doc["selected"] and doc["reference"]["features"][0] == "ratio_words"


def test_provider_error_exit_3(work, tmp_path):
    d, _ = work
    assert run("extract", d / "train.tsv", "--out", tmp_path / "f.tsv", "--mt-endpoint", "http://127.0.0.1:9") == 3
