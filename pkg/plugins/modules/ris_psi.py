#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import load_circuits, psi
    from ..module_utils.ris.psi import FrequencySweep
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_psi
short_description: Isolation sweep of planar spiral inductor equivalent circuits.
description:
    - Computes |S21| in dB of one spiral inductor circuit, or of several circuits in series cascade, between 50 ohm ports.
    - Writes C(sweep.csv) (C(freq_hz,s21_db)) and C(summary.json) with the resonance and the isolation dip.
options:
    circuits:
        description:
            - Circuit JSON files with keys C(L_S), C(C_SP), C(L_V) and optional C(R_S). More than one file cascades them.
        required: true
        type: list
        elements: path
    start:
        description:
            - First sweep frequency in Hz.
        required: false
        type: float
        default: 1000000.0
    stop:
        description:
            - Last sweep frequency in Hz.
        required: false
        type: float
        default: 40000000000.0
    points:
        description:
            - Number of sweep points.
        required: false
        type: int
        default: 4001
    output_dir:
        description:
            - Directory for the sweep outputs.
        required: true
        type: path
author:
    - Oriol Rius (@oriolrius)
'''

EXAMPLES = r'''
- name: Sweep the 28 GHz reference inductor
  oriolrius.ris.ris_psi:
    circuits:
      - "{{ role_path }}/files/psi_28ghz.json"
    output_dir: /tmp/ris/psi

- name: Dual-resonance cascade across 27-29 GHz
  oriolrius.ris.ris_psi:
    circuits:
      - "{{ role_path }}/files/psi_a.json"
      - "{{ role_path }}/files/psi_b.json"
    start: 27000000000.0
    stop: 29000000000.0
    points: 201
    output_dir: /tmp/ris/psi_cascade
'''

RETURN = r'''
changed:
    description: Whether any output file was (or in check mode would be) rewritten.
    type: bool
    returned: always
summary:
    description: Element count, resonant frequencies, dip frequency and minimum |S21| in dB.
    type: dict
    returned: success
'''


def run_module():
    module_args = dict(
        circuits=dict(type='list', elements='path', required=True),
        start=dict(type='float', required=False, default=1e6),
        stop=dict(type='float', required=False, default=40e9),
        points=dict(type='int', required=False, default=4001),
        output_dir=dict(type='path', required=True)
    )

    result = dict(
        changed=False,
        summary={}
    )

    module = AnsibleModule(
        argument_spec=module_args,
        supports_check_mode=True
    )

    if not HAS_NUMPY:
        module.fail_json(msg='numpy and scipy are required. Install them with: pip install -r requirements.txt')

    def compute():
        sweep = FrequencySweep(module.params['start'], module.params['stop'], module.params['points'])
        return module.params['output_dir'], psi(load_circuits(module.params['circuits']), sweep)

    run_in_module(module, compute, result, action="sweeping spiral inductor isolation")


def main():
    run_module()


if __name__ == '__main__':
    main()
