"""Hourly PV energy with uncertainty for a handful of adopters."""

from datetime import timedelta

from solartwin.pv import generate_profiles
from solartwin.records import copy_record
from solartwin.toygen import ToyConfig, gen_irradiance, gen_population, tract_ids

cfg = ToyConfig(n_households=40, n_tracts=2, days=3, seed=7)
pop = gen_population(cfg)

# give everyone a roof size and mark the first few as adopters
fitted = pop.with_records(
    [copy_record(r, solar=r.id < 5, sqft_value=900.0 + 40.0 * r.id) for r in pop]
)
irradiance = {t: gen_irradiance(cfg, t) for t in tract_ids(cfg)}
dates = [cfg.start_date + timedelta(days=i) for i in range(cfg.days)]

profiles = generate_profiles(fitted, irradiance, dates, workers=1, seed=7, n_samples=50)
print(f"{len(profiles)} household-day profiles "
      f"({len(profiles) // len(dates)} adopters x {len(dates)} days)\n")

first = profiles[0]
print(f"household {first.household}, {first.date}: kWh by hour (mean +/- std)")
for hour in range(24):
    m = first.hourly_mean[hour]
    s = first.hourly_std[hour]
    bar = "#" * int(m * 40)
    print(f"  {hour:02d}  {m:.4f} +/- {s:.4f}  {bar}")
print(f"  daily total {first.daily_mean:.3f} kWh +/- {first.daily_std:.3f}")

print("\ndaily means per household-day:")
for prof in profiles:
    print(f"  household {prof.household}  {prof.date}  {prof.daily_mean:.3f} kWh")
