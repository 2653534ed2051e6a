from django.contrib import admin
from experiments.models import ExperimentRun, SeedRun


class SeedRunInline(admin.TabularInline):
    model = SeedRun
    extra = 0
    readonly_fields = ['seed', 'horizon', 'status', 'error', 'csv_path', 'metrics']


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'name', 'preset', 'target', 'status', 'partial', 'get_completed_seeds', 'created_at']
    list_filter = ['target', 'status', 'partial', 'created_at']
    search_fields = ['name', 'preset']
    readonly_fields = ['config', 'summary', 'created_at', 'updated_at']
    inlines = [SeedRunInline]


@admin.register(SeedRun)
class SeedRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'experiment', 'seed', 'horizon', 'status', 'created_at']
    list_filter = ['status', 'horizon']
    search_fields = ['experiment__name']
    readonly_fields = ['created_at', 'updated_at']
