#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import optimize_topology
    from ..module_utils.ris.config import ExperimentConfig
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_optimize_topology
short_description: Optimize the sub-6 GHz element geometry for phase entropy.
description:
    - Runs the constrained genetic algorithm over element geometries that satisfy the DC feeding constraint.
    - Writes the best geometry, the per-generation history, the entropy-versus-angle table and the reflection phase of every state against the incidence angle.
    - Runs are reproducible for a given seed, so repeated runs report C(changed=false).
options:
    config:
        description:
            - Path to the experiment config JSON. The C(topology), C(objective) and C(ga) sections are used.
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
- name: Optimize the 6x6 reference element
  oriolrius.ris.ris_optimize_topology:
    config: "{{ role_path }}/files/topology_reference.json"
    seed: 11
    output_dir: /tmp/ris/topology
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
    description: Best objective, mean entropy over the sweep, the frozen threshold with a pass flag, and the evaluation count.
    type: dict
    returned: success
exit_code:
    description: CLI-equivalent exit code of the failure (3 when no feasible geometry was found).
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
        return config.resolve(config.output_dir), optimize_topology(config)

    run_in_module(module, compute, result, action="optimizing element topology")


def main():
    run_module()


if __name__ == '__main__':
    main()
