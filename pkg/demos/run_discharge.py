"""Discharge the shipped cell at C/3 and look at the voltage trace.

Run from the repository root:  python3 demos/run_discharge.py
"""

import espm

params = espm.load_parameters(espm.data_path("default_config.json"))
mesh = espm.Mesh()

nominal_ah = 12.4
current = nominal_ah / 3.0  # C/3
print(f"discharging at C/3 = {current:.3f} A down to 3.0 V ...")

trace = espm.run_constant_current(params, mesh, current, V_cutoff=3.0)

print(f"termination: {trace.termination}")
print(f"discharged capacity: {trace.capacity_Ah[-1]:.3f} Ah "
      f"({100 * trace.capacity_Ah[-1] / nominal_ah:.1f}% of nominal)")
print(f"duration: {trace.t_s[-1] / 3600:.2f} h over {trace.t_s.size} steps")
print()
print("  t [min]   V [V]   SOC_n   SOC_p   R_film [mOhm]  j_SEI [A/m3]")
step = max(1, trace.t_s.size // 12)
for i in range(0, trace.t_s.size, step):
    print(f"  {trace.t_s[i] / 60:7.1f}  {trace.V_cell_V[i]:6.4f}  "
          f"{trace.soc_n[i]:6.3f}  {trace.soc_p[i]:6.3f}  "
          f"{1e3 * trace.R_film_ohm[i]:12.4f}  {trace.j_sei_A_m3[i]:11.2f}")

trace.to_csv("discharge_c3.csv")
print("\nwrote discharge_c3.csv (plot-ready, SI-suffixed columns)")
