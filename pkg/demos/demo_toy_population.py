"""Generate a toy world and look at what's in it."""

from collections import Counter

from solartwin.toygen import ToyConfig, gen_irradiance, gen_network, gen_population, gen_survey, tract_ids

cfg = ToyConfig(n_households=400, n_tracts=4, seed=0)
pop = gen_population(cfg)

print(f"{len(pop)} households in {cfg.n_tracts} tracts")
print("planted adopters:", sum(1 for r in pop if r.solar))
print("LMI households:  ", sum(1 for r in pop if r.lmi))
print("rural households:", sum(1 for r in pop if r.rural))

classes = Counter(r.sqft_class for r in pop)
print("sqft class mix:", dict(sorted(classes.items())))

# adopters skew wealthier and owner-occupied by construction
adopter_income = [r.features["MONEYPY"] for r in pop if r.solar]
other_income = [r.features["MONEYPY"] for r in pop if not r.solar]
print(f"mean income code: adopters {sum(adopter_income)/len(adopter_income):.2f}"
      f" vs rest {sum(other_income)/len(other_income):.2f}")

tract = tract_ids(cfg)[0]
series = gen_irradiance(cfg, tract)
day = series.ghi_for_date(cfg.start_date)
print(f"\ntract {tract}, {cfg.start_date}: hourly GHI W/m2")
print("  " + " ".join(f"{v:.0f}" for v in day))

graph = gen_network(len(pop), 0.02, groups=2, seed=0)
print(f"\nnetwork: {len(graph.edges)} edges over {graph.node_count} nodes")

survey = gen_survey(cfg, 1000)
print(f"survey: {len(survey)} responses, {min(survey):.0f}-{max(survey):.0f} sqft")
