#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import steer
    from ..module_utils.ris.config import ExperimentConfig
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_steer
short_description: Build beam-steering codebooks for a reconfigurable surface.
description:
    - Quantizes the ideal phase profile of every configured target onto the element alphabet and optionally refines it.
    - Writes C(steering_report.csv), C(codebooks.json) and one pattern CSV per reachable target.
    - Targets outside the pattern grid, or with a beam theta outside [-90, 90], produce an error row instead of failing the task.
    - With C(steering.frequencies) set, every codebook is also evaluated unchanged at those frequencies and C(band_sweep.csv) is written.
options:
    config:
        description:
            - Path to the experiment config JSON.
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
- name: Steer the mmWave reference array over -30..30 degrees
  oriolrius.ris.ris_steer:
    config: "{{ role_path }}/files/mmwave_reference.json"
    output_dir: /tmp/ris/mmwave

- name: Preview which files would change
  oriolrius.ris.ris_steer:
    config: sub6_reference.json
  check_mode: true
'''

RETURN = r'''
changed:
    description: Whether any output file was (or in check mode would be) rewritten.
    type: bool
    returned: always
out_dir:
    description: Directory the outputs were written to.
    type: str
    returned: success
changed_files:
    description: Output files whose content changed.
    type: list
    elements: str
    returned: success
summary:
    description: Target count, failed targets and the largest pointing error in degrees, plus the largest band-sweep pointing error when a band sweep ran.
    type: dict
    returned: success
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
        return config.resolve(config.output_dir), steer(config)

    run_in_module(module, compute, result, action="building steering codebooks")


def main():
    run_module()


if __name__ == '__main__':
    main()
