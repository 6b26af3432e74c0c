#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import synth_array
    from ..module_utils.ris.config import ExperimentConfig
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_synth_array
short_description: Synthesize the port network of a reconfigurable surface array.
description:
    - Builds the coupling impedance matrix and the embedded per-port patterns of the configured array with the analytical oracle.
    - Writes C(network.json), one C(patterns/port_NNN.csv) per port and the structural pattern C(patterns/oc.csv).
    - Fails with exit code 2 when the coupling makes the network non-passive.
options:
    config:
        description:
            - Path to the experiment config JSON. The C(array) and C(grid) sections are used.
        required: true
        type: path
    seed:
        description:
            - Overrides the seed stored in the config.
        required: false
        type: int
    output_dir:
        description:
            - Overrides the output directory stored in the config.
        required: false
        type: path
author:
    - Oriol Rius (@oriolrius)
'''

EXAMPLES = r'''
- name: Export the 8x8 mmWave network
  oriolrius.ris.ris_synth_array:
    config: "{{ role_path }}/files/mmwave_reference.json"
    output_dir: /tmp/ris/network
'''

RETURN = r'''
changed:
    description: Whether any output file was (or in check mode would be) rewritten.
    type: bool
    returned: always
changed_files:
    description: Output files whose content changed.
    type: list
    elements: str
    returned: success
summary:
    description: Port count, frequency and the passivity margin (smallest eigenvalue of Re(Z)).
    type: dict
    returned: success
exit_code:
    description: CLI-equivalent exit code of the failure.
    type: int
    returned: failed
'''


def run_module():
    module_args = dict(
        config=dict(type='path', required=True),
        seed=dict(type='int', required=False),
        output_dir=dict(type='path', required=False)
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
        config = ExperimentConfig.from_file(module.params['config'], module.params['seed'],
                                            module.params['output_dir'])
        return config.resolve(config.output_dir), synth_array(config)

    run_in_module(module, compute, result, action="synthesizing array network")


def main():
    run_module()


if __name__ == '__main__':
    main()
