# Generated by Django 5.2.4 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('experiment', models.CharField(choices=[('tent', 'Tent'), ('trembling', 'Trembling'), ('min_law', 'Min Law'), ('upper_bound', 'Upper Bound'), ('long_term', 'Long Term'), ('shell', 'Shell'), ('asymptotic_causality', 'Asymptotic Causality'), ('efsinc', 'Efsinc'), ('indicator', 'Indicator'), ('pp_consistency', 'Pp Consistency'), ('gpteb_search', 'Gpteb Search'), ('open_problem_search', 'Open Problem Search')], max_length=40)),
                ('config', models.JSONField(default=dict)),
                ('manifest', models.JSONField(default=dict)),
                ('output_dir', models.CharField(max_length=500)),
                ('all_passed', models.BooleanField(default=False)),
                ('seed', models.IntegerField(default=0)),
                ('tool_version', models.CharField(max_length=20)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
