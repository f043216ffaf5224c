"""Temp smoke: generator/runner across all profiles + day round-trip + determinism."""
import time

from hace import generate, runner
from hace.catspec import parse_text, render_instance

t0 = time.time()
for profile in generate.PROFILES:
    for seed in range(8):
        inst = generate.instance(seed, profile)
        kind = "day" if profile == "day" else ("fubini" if profile == "fubini" else "check-all")
        out = runner.run_instance_job(inst, kind, cap=200000)
        assert out["ok"], (profile, seed, out)
    print(f"{profile} ok: 8 seeds ({time.time()-t0:.1f}s)")

# day catspec round trip: render a generated day instance, parse it back, run it
inst = generate.instance(3, "day")
text = render_instance(inst)
spec = parse_text(text)
rep = runner.run_spec(spec, cap=200000)
assert rep["ok"], rep
print("day catspec round-trip ok")

# determinism: same seed/profile twice -> byte-identical reports
for profile in generate.PROFILES:
    kind = "day" if profile == "day" else ("fubini" if profile == "fubini" else "check-all")
    a = runner.render_report(runner.run_instance_job(generate.instance(5, profile), kind, cap=200000), "json")
    b = runner.render_report(runner.run_instance_job(generate.instance(5, profile), kind, cap=200000), "json")
    assert a == b, profile
print("determinism ok")
print("GEN SMOKE PASSED")
